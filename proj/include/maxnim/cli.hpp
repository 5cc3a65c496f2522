#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "maxnim/core.hpp"
#include "maxnim/solver.hpp"

namespace maxnim::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kUsage = 2,
  kResourceBound = 3,
};

/// Runs the `maxnim` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

/// Interactive game loop behind `maxnim play`. Piles are numbered from 1 for
/// the human; returns when the game ends, on `quit`, or at end of input.
int play_loop(Position start, const RuleSequence& rule, bool pass_variant, bool engine_first,
              std::istream& in, std::ostream& out);

}  // namespace maxnim::cli
