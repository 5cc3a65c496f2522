#pragma once

// Equivalence sweeps: each suite enumerates a domain, evaluates it with the
// brute-force oracle and with a closed form, and records every disagreement.

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "maxnim/core.hpp"
#include "maxnim/oracle.hpp"

namespace maxnim {

inline constexpr std::size_t kMaxReportedFailures = 100;

struct Failure {
  Position position;
  std::uint64_t expected = 0;  // oracle (or reference) value
  std::uint64_t got = 0;       // closed-form value
};

struct VerificationReport {
  std::string suite;
  std::string domain;
  std::uint64_t checked = 0;
  /// At most kMaxReportedFailures entries, in domain order.
  std::vector<Failure> failures;
  /// All failures, including those not listed.
  std::uint64_t failure_count = 0;
  std::chrono::milliseconds elapsed{0};

  bool passed() const noexcept { return failure_count == 0; }

  void record(Failure f);

  /// `{"suite":..,"domain":..,"checked":n,"failures":[..],"elapsed_ms":n}`.
  /// Without timing the document is a pure function of the suite inputs.
  std::string to_json(bool include_timing = true) const;
};

struct VerifyOptions {
  /// Worker threads for sharded suites; 0 means hardware concurrency.
  unsigned workers = 0;
  std::size_t memo_capacity = kDefaultMemoCapacity;
};

VerificationReport verify_half_single(Stones t_max, const VerifyOptions& opts = {});
VerificationReport verify_pass_single(Stones t_max, const VerifyOptions& opts = {});
/// Pass-free n-pile box [0, max]^n against the nim-sum of single-pile values.
VerificationReport verify_sum(std::size_t n, Stones max_per_pile, const VerifyOptions& opts = {});
/// n-pile box [0, max]^n with both pass flags.
VerificationReport verify_pass_multi(std::size_t n, Stones max_per_pile, const VerifyOptions& opts = {});

/// Regular rule whose increments are independent fair bits from
/// mt19937_64(seed), defined on [0, t_max].
RuleSequence random_regular_rule(std::uint64_t seed, Stones t_max, std::string name);

/// Levine recurrence against the oracle on t in [0, t_max] for half, full,
/// min(m,1) and `num_rules` random regular rules derived from `seed`.
VerificationReport verify_levine(std::uint64_t seed, std::size_t num_rules, Stones t_max,
                                 const VerifyOptions& opts = {});

/// Reference values for the sixteen three-pile positions with piles in {0,1}.
struct SmallCase {
  Position position;
  std::uint64_t value;
};
const std::vector<SmallCase>& small_cases();

using PositionEvaluator = std::function<GrundyValue(const Position&)>;

/// The sixteen small-case values checked against the oracle and against
/// `closed` (defaults to half_grundy_pass_multi).
VerificationReport verify_small_cases(const PositionEvaluator& closed = {});

}  // namespace maxnim
