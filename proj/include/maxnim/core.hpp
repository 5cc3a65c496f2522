#pragma once

// Rule sequences, positions, moves and the nim-sum / mex algebra shared by
// every evaluator in the library.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace maxnim {

using Stones = std::uint64_t;

/// Largest pile accepted by the position parser and the closed-form front ends.
inline constexpr Stones kDefaultPileLimit = 0xFFFFFFFFull;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IllegalMoveError : public Error {
 public:
  using Error::Error;
};

/// The oracle's memo (or some other configured capacity) would be exceeded.
class ResourceBoundError : public Error {
 public:
  using Error::Error;
};

class NonRegularRuleError : public Error {
 public:
  using Error::Error;
};

class UnsupportedRuleError : public Error {
 public:
  using Error::Error;
};

/// Malformed user input: position strings, rule files, wire bodies.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A table-backed rule was queried past its last defined pile size.
class RuleDomainError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Grundy values

/// Non-negative Grundy number. Zero exactly at P-positions.
struct GrundyValue {
  std::uint64_t value = 0;

  constexpr bool is_zero() const noexcept { return value == 0; }
  friend constexpr auto operator<=>(const GrundyValue&, const GrundyValue&) = default;
  friend constexpr GrundyValue operator^(GrundyValue a, GrundyValue b) noexcept {
    return GrundyValue{a.value ^ b.value};
  }
};

/// Binary sum without carry.
constexpr std::uint64_t nim_sum(std::uint64_t x, std::uint64_t y) noexcept { return x ^ y; }

/// Smallest non-negative integer absent from `values`. Duplicates and any
/// order are fine.
std::uint64_t mex(std::span<const std::uint64_t> values);
std::uint64_t mex(std::initializer_list<std::uint64_t> values);

// ---------------------------------------------------------------------------
// Rule sequences

enum class RuleKind { half_ceiling, full, custom };

std::string_view to_string(RuleKind kind);

/// Per-pile removal cap f(m). Cheap to copy; the cap function is shared.
class RuleSequence {
 public:
  using CapFn = std::function<Stones(Stones)>;

  /// f(m) = ceil(m/2).
  static RuleSequence half_ceiling();
  /// f(m) = m, classical Nim.
  static RuleSequence full();
  /// Arbitrary cap function, defined for every m.
  static RuleSequence custom(std::string name, CapFn cap);
  /// f(0..caps.size()-1) given explicitly; querying past the table throws
  /// RuleDomainError.
  static RuleSequence from_table(std::string name, std::vector<Stones> caps);
  /// Newline-separated f(0), f(1), ... values. Blank lines and `#` comments
  /// are skipped. Throws ParseError on malformed content.
  static RuleSequence from_file(const std::string& path);
  /// "half", "full" or "file:PATH".
  static RuleSequence from_spec(std::string_view spec);

  Stones cap(Stones m) const;
  Stones operator()(Stones m) const { return cap(m); }

  const std::string& name() const noexcept { return name_; }
  RuleKind kind() const noexcept { return kind_; }
  /// Largest m for which cap(m) is defined, if the rule is finite.
  std::optional<Stones> domain_limit() const noexcept { return domain_limit_; }

 private:
  RuleSequence(std::string name, RuleKind kind, CapFn cap, std::optional<Stones> limit);

  std::string name_;
  RuleKind kind_;
  CapFn cap_;
  std::optional<Stones> domain_limit_;
};

struct RegularityCheck {
  bool ok = true;
  /// Smallest m where the rule breaks regularity (0 means f(0) != 0).
  std::optional<Stones> first_violation;

  explicit operator bool() const noexcept { return ok; }
};

/// Checks f(0) = 0 and 0 <= f(m) - f(m-1) <= 1 for m in [1, bound]. For
/// table rules the bound is clamped to the table.
RegularityCheck validate_regular(const RuleSequence& rule, Stones bound);

// ---------------------------------------------------------------------------
// Positions and moves

struct Position {
  std::vector<Stones> piles;
  bool pass_available = false;

  Position() = default;
  Position(std::vector<Stones> p, bool pass = false) : piles(std::move(p)), pass_available(pass) {}

  Stones total() const noexcept;
  std::size_t nonzero_piles() const noexcept;

  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;
};

/// "3,5,7" -> {3,5,7}. Whitespace around numbers is tolerated; empty
/// fields, signs and values above `limit` are rejected with ParseError.
std::vector<Stones> parse_piles(std::string_view text, Stones limit = kDefaultPileLimit);
std::string format_piles(std::span<const Stones> piles);

struct Remove {
  std::size_t pile = 0;
  Stones count = 1;
  friend bool operator==(const Remove&, const Remove&) = default;
};

struct Pass {
  friend bool operator==(const Pass&, const Pass&) = default;
};

using Move = std::variant<Remove, Pass>;

inline bool is_pass(const Move& m) noexcept { return std::holds_alternative<Pass>(m); }

/// "take <pile> <count>" with a 0-based pile, or "pass".
std::string to_string(const Move& m);

/// Every legal move, ordered by pile index, then count, then Pass last.
std::vector<Move> legal_moves(const Position& pos, const RuleSequence& rule, bool pass_variant);

/// Number of moves legal_moves would return, without materialising them.
std::uint64_t count_legal_moves(const Position& pos, const RuleSequence& rule, bool pass_variant);

bool is_legal(const Position& pos, const Move& move, const RuleSequence& rule, bool pass_variant);

/// Applies a legal move. Throws IllegalMoveError otherwise.
Position apply_move(const Position& pos, const Move& move, const RuleSequence& rule,
                    bool pass_variant);

bool is_terminal(const Position& pos, const RuleSequence& rule, bool pass_variant);

}  // namespace maxnim
