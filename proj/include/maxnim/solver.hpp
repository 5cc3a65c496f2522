#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include "maxnim/core.hpp"
#include "maxnim/oracle.hpp"

namespace maxnim {

enum class Outcome { P, N };
enum class Evaluator { closed_form, oracle };
/// How an Engine picks its evaluator. `automatic` uses the closed form for
/// half-ceiling rules and the oracle for everything else.
enum class Method { automatic, closed, oracle };

std::string_view to_string(Outcome o);
std::string_view to_string(Evaluator e);
Method parse_method(std::string_view text);

struct Analysis {
  GrundyValue grundy;
  Outcome outcome = Outcome::P;
  /// First move in legal_moves order that reaches a Grundy-0 position.
  /// Present exactly when outcome is N.
  std::optional<Move> best;
  Evaluator evaluator_used = Evaluator::closed_form;
};

class StrategyError : public IllegalMoveError {
 public:
  using IllegalMoveError::IllegalMoveError;
};

/// Grundy evaluation and move choice for one game (rule + pass variant).
/// Safe to share between threads; oracle access is serialised internally.
class Engine {
 public:
  Engine(RuleSequence rule, bool pass_variant, Method method = Method::automatic,
         std::size_t memo_capacity = kDefaultMemoCapacity);

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  GrundyValue grundy(const Position& pos);
  Analysis analyze(const Position& pos);

  /// The move the engine plays: `best` when winning, otherwise the first
  /// legal move. Throws IllegalMoveError from a terminal position.
  Move choose_move(const Position& pos);

  Evaluator evaluator() const noexcept { return evaluator_; }
  const RuleSequence& rule() const noexcept { return rule_; }
  bool pass_variant() const noexcept { return pass_variant_; }

 private:
  std::optional<Move> best_move(const Position& pos, GrundyValue g);

  RuleSequence rule_;
  bool pass_variant_;
  Evaluator evaluator_;
  std::mutex oracle_mutex_;
  OracleSession oracle_;
};

/// One-shot analysis with Method::automatic.
Analysis analyze(const Position& pos, const RuleSequence& rule, bool pass_variant);

/// First legal move whose successor `grundy_of` maps to zero, by walking
/// legal_moves in order. Linear in the move count; the Engine uses a direct
/// search for half-ceiling rules and this walk for everything else.
std::optional<Move> first_winning_move(const Position& pos, const RuleSequence& rule,
                                       bool pass_variant,
                                       const std::function<GrundyValue(const Position&)>& grundy_of);

/// Largest x in [lo, hi] with half_grundy(x) == target.
std::optional<Stones> largest_half_preimage(std::uint64_t target, Stones lo, Stones hi);

// ---------------------------------------------------------------------------
// Play-outs

enum class Side { next, prev };

using Strategy = std::function<Move(const Position&)>;

struct Ply {
  Side mover;
  Position before;
  Move move;
};

struct GameRecord {
  Side winner = Side::prev;
  std::vector<Ply> transcript;
  Position final_position;
};

/// Alternates the two strategies from `start` (`first` moves first) until
/// the mover has no legal move; that player loses. Throws StrategyError if a
/// strategy returns an illegal move.
GameRecord simulate(const Position& start, const RuleSequence& rule, bool pass_variant,
                    const Strategy& first, const Strategy& second);

/// Plays Engine::choose_move. The engine must outlive the strategy.
Strategy optimal_strategy(Engine& engine);
/// Uniform over legal moves, from a seeded mt19937_64.
Strategy random_strategy(RuleSequence rule, bool pass_variant, std::uint64_t seed);

}  // namespace maxnim
