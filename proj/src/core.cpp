#include "maxnim/core.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace maxnim {

std::uint64_t mex(std::span<const std::uint64_t> values) {
  // The mex of n values is at most n, so anything larger can be ignored.
  std::vector<bool> seen(values.size() + 1, false);
  for (auto v : values) {
    if (v < seen.size()) seen[v] = true;
  }
  std::uint64_t k = 0;
  while (k < seen.size() && seen[k]) ++k;
  return k;
}

std::uint64_t mex(std::initializer_list<std::uint64_t> values) {
  return mex(std::span<const std::uint64_t>(values.begin(), values.size()));
}

std::string_view to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::half_ceiling: return "half_ceiling";
    case RuleKind::full: return "full";
    case RuleKind::custom: return "custom";
  }
  return "custom";
}

RuleSequence::RuleSequence(std::string name, RuleKind kind, CapFn cap, std::optional<Stones> limit)
    : name_(std::move(name)), kind_(kind), cap_(std::move(cap)), domain_limit_(limit) {}

RuleSequence RuleSequence::half_ceiling() {
  // m/2 + m%2 cannot overflow, unlike (m+1)/2.
  return RuleSequence("half", RuleKind::half_ceiling, [](Stones m) { return m / 2 + m % 2; },
                      std::nullopt);
}

RuleSequence RuleSequence::full() {
  return RuleSequence("full", RuleKind::full, [](Stones m) { return m; }, std::nullopt);
}

RuleSequence RuleSequence::custom(std::string name, CapFn cap) {
  return RuleSequence(std::move(name), RuleKind::custom, std::move(cap), std::nullopt);
}

RuleSequence RuleSequence::from_table(std::string name, std::vector<Stones> caps) {
  if (caps.empty()) throw ParseError("rule table is empty");
  const Stones limit = caps.size() - 1;
  auto table = std::make_shared<const std::vector<Stones>>(std::move(caps));
  std::string label = name;
  return RuleSequence(
      std::move(name), RuleKind::custom,
      [table, label](Stones m) {
        if (m >= table->size()) {
          throw RuleDomainError("rule '" + label + "' is defined only for m <= " +
                                std::to_string(table->size() - 1) + ", queried m = " +
                                std::to_string(m));
        }
        return (*table)[m];
      },
      limit);
}

RuleSequence RuleSequence::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open rule file '" + path + "'");
  std::vector<Stones> caps;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string_view field(line.data() + first, last - first + 1);
    Stones value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected a non-negative integer");
    }
    caps.push_back(value);
  }
  if (caps.empty()) throw ParseError("rule file '" + path + "' holds no values");
  return from_table("file:" + path, std::move(caps));
}

RuleSequence RuleSequence::from_spec(std::string_view spec) {
  if (spec == "half" || spec == "half_ceiling") return half_ceiling();
  if (spec == "full") return full();
  if (spec.starts_with("file:")) return from_file(std::string(spec.substr(5)));
  throw ParseError("unknown rule '" + std::string(spec) + "' (expected half, full or file:PATH)");
}

Stones RuleSequence::cap(Stones m) const { return cap_(m); }

RegularityCheck validate_regular(const RuleSequence& rule, Stones bound) {
  if (rule.cap(0) != 0) return {false, Stones{0}};
  if (auto limit = rule.domain_limit()) bound = std::min(bound, *limit);
  Stones prev = 0;
  for (Stones m = 1; m <= bound; ++m) {
    const Stones cur = rule.cap(m);
    if (cur < prev || cur - prev > 1) return {false, m};
    prev = cur;
    if (m == bound) break;  // bound may be UINT64_MAX
  }
  return {true, std::nullopt};
}

Stones Position::total() const noexcept {
  Stones sum = 0;
  for (auto p : piles) sum += p;
  return sum;
}

std::size_t Position::nonzero_piles() const noexcept {
  return static_cast<std::size_t>(std::count_if(piles.begin(), piles.end(), [](Stones p) { return p != 0; }));
}

std::vector<Stones> parse_piles(std::string_view text, Stones limit) {
  std::vector<Stones> piles;
  std::size_t start = 0;
  while (true) {
    auto comma = text.find(',', start);
    auto field = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
    if (field.empty()) throw ParseError("empty pile in '" + std::string(text) + "'");
    Stones value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec == std::errc::result_out_of_range || (ec == std::errc{} && value > limit)) {
      throw ParseError("pile '" + std::string(field) + "' exceeds the limit " + std::to_string(limit));
    }
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
      throw ParseError("pile '" + std::string(field) + "' is not a non-negative integer");
    }
    piles.push_back(value);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return piles;
}

std::string format_piles(std::span<const Stones> piles) {
  std::string out;
  for (std::size_t i = 0; i < piles.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(piles[i]);
  }
  return out;
}

std::string to_string(const Move& m) {
  if (auto* r = std::get_if<Remove>(&m)) {
    return "take " + std::to_string(r->pile) + " " + std::to_string(r->count);
  }
  return "pass";
}

namespace {

bool pass_legal(const Position& pos, bool pass_variant) {
  return pass_variant && pos.pass_available && pos.total() > 0;
}

}  // namespace

std::vector<Move> legal_moves(const Position& pos, const RuleSequence& rule, bool pass_variant) {
  std::vector<Move> moves;
  moves.reserve(static_cast<std::size_t>(count_legal_moves(pos, rule, pass_variant)));
  for (std::size_t i = 0; i < pos.piles.size(); ++i) {
    if (pos.piles[i] == 0) continue;
    const Stones cap = std::min(rule.cap(pos.piles[i]), pos.piles[i]);
    for (Stones v = 1; v <= cap; ++v) moves.emplace_back(Remove{i, v});
  }
  if (pass_legal(pos, pass_variant)) moves.emplace_back(Pass{});
  return moves;
}

std::uint64_t count_legal_moves(const Position& pos, const RuleSequence& rule, bool pass_variant) {
  std::uint64_t n = 0;
  for (auto p : pos.piles) {
    if (p != 0) n += std::min(rule.cap(p), p);
  }
  return n + (pass_legal(pos, pass_variant) ? 1 : 0);
}

bool is_legal(const Position& pos, const Move& move, const RuleSequence& rule, bool pass_variant) {
  if (is_pass(move)) return pass_legal(pos, pass_variant);
  const auto& r = std::get<Remove>(move);
  if (r.pile >= pos.piles.size() || r.count == 0) return false;
  const Stones pile = pos.piles[r.pile];
  return pile != 0 && r.count <= std::min(rule.cap(pile), pile);
}

Position apply_move(const Position& pos, const Move& move, const RuleSequence& rule,
                    bool pass_variant) {
  if (!is_legal(pos, move, rule, pass_variant)) {
    throw IllegalMoveError("illegal move '" + to_string(move) + "' from [" + format_piles(pos.piles) +
                           "]" + (pos.pass_available ? " with pass available" : ""));
  }
  Position next = pos;
  if (is_pass(move)) {
    next.pass_available = false;
  } else {
    const auto& r = std::get<Remove>(move);
    next.piles[r.pile] -= r.count;
  }
  return next;
}

bool is_terminal(const Position& pos, const RuleSequence& rule, bool pass_variant) {
  if (pass_legal(pos, pass_variant)) return false;
  for (auto p : pos.piles) {
    if (p != 0 && rule.cap(p) != 0) return false;
  }
  return true;
}

}  // namespace maxnim
