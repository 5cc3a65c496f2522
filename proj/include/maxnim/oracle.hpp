#pragma once

// Brute-force Sprague-Grundy evaluation straight from the definition: the
// Grundy value of a position is the mex of its successors' values. This is
// the ground truth every closed form is checked against.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "maxnim/core.hpp"

namespace maxnim {

inline constexpr std::size_t kDefaultMemoCapacity = 10'000'000;

struct OracleStats {
  std::uint64_t states_evaluated = 0;
  std::uint64_t memo_hits = 0;
};

struct TableEntry {
  Position position;
  GrundyValue grundy;
};

struct GrundyTable {
  std::size_t n_piles = 0;
  Stones max_per_pile = 0;
  bool include_pass_states = false;
  /// Lexicographic on piles (first pile most significant), then pass 0 < 1.
  std::vector<TableEntry> entries;

  /// Header `pile_1,...,pile_n[,pass],grundy`; one row per entry.
  std::string to_csv() const;
  /// `[{"piles":[...],"pass":0|1,"grundy":k},...]`, compact, no trailing newline.
  std::string to_json() const;
};

/// Memoized oracle for one rule. Not thread-safe: give each worker its own
/// session.
class OracleSession {
 public:
  explicit OracleSession(RuleSequence rule, bool pass_variant,
                         std::size_t memo_capacity = kDefaultMemoCapacity);

  /// Throws ResourceBoundError when the memo would grow past capacity.
  GrundyValue grundy(const Position& pos);

  GrundyTable table(std::size_t n_piles, Stones max_per_pile, bool include_pass_states);

  const RuleSequence& rule() const noexcept { return rule_; }
  bool pass_variant() const noexcept { return pass_variant_; }
  const OracleStats& stats() const noexcept { return stats_; }
  std::size_t memo_size() const noexcept { return memo_.size(); }
  std::size_t memo_capacity() const noexcept { return capacity_; }
  void clear();

 private:
  using Key = std::vector<Stones>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  // Writes the canonical key of (piles, pass) into scratch_.
  const Key& canonical(const std::vector<Stones>& piles, bool pass);
  const std::uint64_t* lookup(const std::vector<Stones>& piles, bool pass);
  void store(const std::vector<Stones>& piles, bool pass, std::uint64_t value);

  RuleSequence rule_;
  bool pass_variant_;
  std::size_t capacity_;
  std::unordered_map<Key, std::uint64_t, KeyHash> memo_;
  Key scratch_;
  OracleStats stats_;
};

}  // namespace maxnim
