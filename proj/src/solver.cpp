#include "maxnim/solver.hpp"

#include <memory>
#include <random>

#include "maxnim/closed_form.hpp"

namespace maxnim {

std::string_view to_string(Outcome o) { return o == Outcome::P ? "P" : "N"; }

std::string_view to_string(Evaluator e) {
  return e == Evaluator::closed_form ? "closed_form" : "oracle";
}

Method parse_method(std::string_view text) {
  if (text == "auto") return Method::automatic;
  if (text == "closed") return Method::closed;
  if (text == "oracle") return Method::oracle;
  throw ParseError("unknown method '" + std::string(text) + "' (expected auto, closed or oracle)");
}

std::optional<Stones> largest_half_preimage(std::uint64_t target, Stones lo, Stones hi) {
  // The values with half_grundy(x) == target form the chain x0, 2*x0+2, ...
  // where x0 is 0 for target 0 and the odd number 2*target-1 otherwise.
  if (target > (Stones{1} << 63)) return std::nullopt;
  Stones x = target == 0 ? 0 : 2 * target - 1;
  if (lo > hi || x > hi) return std::nullopt;
  while (hi >= 2 && x <= (hi - 2) / 2) x = 2 * x + 2;
  if (x < lo) return std::nullopt;
  return x;
}

namespace {

Stones half_cap(Stones m) { return m / 2 + m % 2; }

// Direct search for the first Grundy-0 successor under f(m) = ceil(m/2).
// Mirrors legal_moves order: piles ascending, smallest removal (= largest
// remaining x) first, Pass last.
std::optional<Move> half_best_move(const Position& pos, bool pass) {
  const std::size_t n = pos.piles.size();
  std::vector<std::uint64_t> g(n);
  std::uint64_t all = 0;
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = half_grundy(pos.piles[i]).value;
    all ^= g[i];
    if (pos.piles[i] != 0) ++nonzero;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Stones p = pos.piles[i];
    if (p == 0) continue;
    const Stones lo = p - half_cap(p);
    const Stones hi = p - 1;
    const std::uint64_t rest = all ^ g[i];

    if (!pass) {
      if (auto x = largest_half_preimage(rest, lo, hi)) return Remove{i, p - *x};
      continue;
    }

    const std::size_t others = nonzero - 1;
    // Remaining pile x > 0: the successor keeps others+1 nonzero piles.
    const std::uint64_t target = others == 0 ? 2 : (rest ^ 1);
    if (auto x = largest_half_preimage(target, std::max<Stones>(lo, 1), hi)) {
      return Remove{i, p - *x};
    }
    // Emptying the pile.
    if (lo == 0) {
      const bool zero = others == 0 || (others == 1 && rest == 2) || (others >= 2 && rest == 1);
      if (zero) return Remove{i, p};
    }
  }

  if (pass && all == 0) return Pass{};
  return std::nullopt;
}

}  // namespace

std::optional<Move> first_winning_move(const Position& pos, const RuleSequence& rule,
                                       bool pass_variant,
                                       const std::function<GrundyValue(const Position&)>& grundy_of) {
  for (const auto& m : legal_moves(pos, rule, pass_variant)) {
    if (grundy_of(apply_move(pos, m, rule, pass_variant)).is_zero()) return m;
  }
  return std::nullopt;
}

Engine::Engine(RuleSequence rule, bool pass_variant, Method method, std::size_t memo_capacity)
    : rule_(rule), pass_variant_(pass_variant), oracle_(std::move(rule), pass_variant, memo_capacity) {
  switch (method) {
    case Method::automatic:
      evaluator_ = rule_.kind() == RuleKind::half_ceiling ? Evaluator::closed_form : Evaluator::oracle;
      break;
    case Method::closed:
      if (rule_.kind() != RuleKind::half_ceiling && pass_variant_) {
        throw UnsupportedRuleError("closed-form pass evaluation is available only for the half rule");
      }
      evaluator_ = Evaluator::closed_form;
      break;
    case Method::oracle:
      evaluator_ = Evaluator::oracle;
      break;
  }
}

GrundyValue Engine::grundy(const Position& pos) {
  if (evaluator_ == Evaluator::closed_form) return closed_form_grundy(pos, rule_, pass_variant_);
  std::lock_guard lock(oracle_mutex_);
  return oracle_.grundy(pos);
}

std::optional<Move> Engine::best_move(const Position& pos, GrundyValue g) {
  if (g.is_zero()) return std::nullopt;
  if (evaluator_ == Evaluator::closed_form && rule_.kind() == RuleKind::half_ceiling) {
    return half_best_move(pos, pass_variant_ && pos.pass_available);
  }
  return first_winning_move(pos, rule_, pass_variant_,
                            [this](const Position& p) { return grundy(p); });
}

Analysis Engine::analyze(const Position& pos) {
  Analysis a;
  a.grundy = grundy(pos);
  a.outcome = a.grundy.is_zero() ? Outcome::P : Outcome::N;
  a.best = best_move(pos, a.grundy);
  a.evaluator_used = evaluator_;
  return a;
}

Move Engine::choose_move(const Position& pos) {
  if (auto best = analyze(pos).best) return *best;
  // Losing position: any move loses against perfect play; take the first.
  for (std::size_t i = 0; i < pos.piles.size(); ++i) {
    if (pos.piles[i] != 0 && std::min(rule_.cap(pos.piles[i]), pos.piles[i]) >= 1) return Remove{i, 1};
  }
  if (pass_variant_ && pos.pass_available && pos.total() > 0) return Pass{};
  throw IllegalMoveError("no legal move from terminal position [" + format_piles(pos.piles) + "]");
}

Analysis analyze(const Position& pos, const RuleSequence& rule, bool pass_variant) {
  Engine engine(rule, pass_variant);
  return engine.analyze(pos);
}

GameRecord simulate(const Position& start, const RuleSequence& rule, bool pass_variant,
                    const Strategy& first, const Strategy& second) {
  GameRecord rec;
  Position pos = start;
  if (!pass_variant) pos.pass_available = false;
  Side mover = Side::next;
  while (!is_terminal(pos, rule, pass_variant)) {
    const Strategy& s = mover == Side::next ? first : second;
    Move m = s(pos);
    if (!is_legal(pos, m, rule, pass_variant)) {
      throw StrategyError("strategy for the " + std::string(mover == Side::next ? "next" : "previous") +
                          " player returned illegal move '" + to_string(m) + "' at [" +
                          format_piles(pos.piles) + "]");
    }
    Position after = apply_move(pos, m, rule, pass_variant);
    rec.transcript.push_back({mover, std::move(pos), m});
    pos = std::move(after);
    mover = mover == Side::next ? Side::prev : Side::next;
  }
  // The side to move at a terminal position has lost.
  rec.winner = mover == Side::next ? Side::prev : Side::next;
  rec.final_position = std::move(pos);
  return rec;
}

Strategy optimal_strategy(Engine& engine) {
  return [&engine](const Position& pos) { return engine.choose_move(pos); };
}

Strategy random_strategy(RuleSequence rule, bool pass_variant, std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [rule = std::move(rule), pass_variant, rng](const Position& pos) {
    auto moves = legal_moves(pos, rule, pass_variant);
    if (moves.empty()) throw IllegalMoveError("random strategy asked to move from a terminal position");
    return moves[(*rng)() % moves.size()];
  };
}

}  // namespace maxnim
