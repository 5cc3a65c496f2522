#include "maxnim/oracle.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace maxnim {

std::size_t OracleSession::KeyHash::operator()(const Key& k) const noexcept {
  // splitmix64 finaliser folded over the key.
  std::uint64_t h = 0x9E3779B97F4A7C15ull ^ k.size();
  for (auto x : k) {
    std::uint64_t z = x + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    h ^= z ^ (z >> 31);
  }
  return static_cast<std::size_t>(h);
}

OracleSession::OracleSession(RuleSequence rule, bool pass_variant, std::size_t memo_capacity)
    : rule_(std::move(rule)), pass_variant_(pass_variant), capacity_(memo_capacity) {}

void OracleSession::clear() {
  memo_.clear();
  stats_ = {};
}

const OracleSession::Key& OracleSession::canonical(const std::vector<Stones>& piles, bool pass) {
  scratch_.assign(piles.begin(), piles.end());
  std::sort(scratch_.begin(), scratch_.end(), std::greater<>());
  scratch_.push_back(pass && pass_variant_ ? 1 : 0);
  return scratch_;
}

const std::uint64_t* OracleSession::lookup(const std::vector<Stones>& piles, bool pass) {
  auto it = memo_.find(canonical(piles, pass));
  return it == memo_.end() ? nullptr : &it->second;
}

void OracleSession::store(const std::vector<Stones>& piles, bool pass, std::uint64_t value) {
  if (memo_.size() >= capacity_) {
    throw ResourceBoundError("oracle memo capacity of " + std::to_string(capacity_) +
                             " states exceeded");
  }
  memo_.emplace(canonical(piles, pass), value);
}

namespace {

// One pending evaluation on the explicit work stack. The cursor walks the
// moves in legal_moves order without materialising them.
struct Frame {
  Frame(std::vector<Stones> p, bool pass_flag) : piles(std::move(p)), pass(pass_flag) {}

  std::vector<Stones> piles;
  bool pass = false;
  std::size_t pile = 0;
  Stones next_count = 1;
  bool pass_tried = false;
  std::vector<std::uint64_t> successor_values;
};

}  // namespace

GrundyValue OracleSession::grundy(const Position& pos) {
  const bool root_pass = pos.pass_available && pass_variant_;
  if (auto* hit = lookup(pos.piles, root_pass)) {
    ++stats_.memo_hits;
    return GrundyValue{*hit};
  }

  std::deque<Frame> stack;
  stack.emplace_back(pos.piles, root_pass);

  while (!stack.empty()) {
    Frame& f = stack.back();
    bool descended = false;

    while (f.pile < f.piles.size()) {
      const Stones size = f.piles[f.pile];
      const Stones cap = size == 0 ? 0 : std::min(rule_.cap(size), size);
      if (f.next_count > cap) {
        ++f.pile;
        f.next_count = 1;
        continue;
      }
      f.piles[f.pile] = size - f.next_count;
      const std::uint64_t* hit = lookup(f.piles, f.pass);
      if (hit) {
        ++stats_.memo_hits;
        f.successor_values.push_back(*hit);
        f.piles[f.pile] = size;
        ++f.next_count;
        continue;
      }
      Frame child(f.piles, f.pass);
      f.piles[f.pile] = size;
      stack.push_back(std::move(child));
      descended = true;
      break;
    }
    if (descended) continue;

    if (!f.pass_tried) {
      const bool can_pass = f.pass && std::any_of(f.piles.begin(), f.piles.end(),
                                                  [](Stones p) { return p != 0; });
      if (can_pass) {
        if (const std::uint64_t* hit = lookup(f.piles, false)) {
          ++stats_.memo_hits;
          f.successor_values.push_back(*hit);
        } else {
          Frame child(f.piles, false);
          stack.push_back(std::move(child));
          continue;
        }
      }
      f.pass_tried = true;
    }

    const std::uint64_t value = mex(f.successor_values);
    store(f.piles, f.pass, value);
    ++stats_.states_evaluated;
    stack.pop_back();
  }

  return GrundyValue{*lookup(pos.piles, root_pass)};
}

GrundyTable OracleSession::table(std::size_t n_piles, Stones max_per_pile, bool include_pass_states) {
  if (n_piles == 0) throw Error("table needs at least one pile");
  if (include_pass_states && !pass_variant_) {
    throw Error("pass states requested from a session without the pass variant");
  }
  // Entry count with overflow detection.
  std::size_t count = include_pass_states ? 2 : 1;
  for (std::size_t i = 0; i < n_piles; ++i) {
    if (max_per_pile + 1 == 0 || count > capacity_ / (max_per_pile + 1)) {
      throw ResourceBoundError("table of " + std::to_string(n_piles) + " piles up to " +
                               std::to_string(max_per_pile) + " exceeds memo capacity " +
                               std::to_string(capacity_));
    }
    count *= static_cast<std::size_t>(max_per_pile + 1);
  }

  GrundyTable t{n_piles, max_per_pile, include_pass_states, {}};
  t.entries.reserve(count);
  std::vector<Stones> piles(n_piles, 0);
  while (true) {
    for (int pass = 0; pass <= (include_pass_states ? 1 : 0); ++pass) {
      Position p{piles, pass == 1};
      auto g = grundy(p);
      t.entries.push_back({std::move(p), g});
    }
    // Odometer, last pile fastest.
    std::size_t i = n_piles;
    while (i > 0 && piles[i - 1] == max_per_pile) piles[--i] = 0;
    if (i == 0) break;
    ++piles[i - 1];
  }
  return t;
}

std::string GrundyTable::to_csv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < n_piles; ++i) out << "pile_" << (i + 1) << ',';
  if (include_pass_states) out << "pass,";
  out << "grundy\n";
  for (const auto& e : entries) {
    for (auto p : e.position.piles) out << p << ',';
    if (include_pass_states) out << (e.position.pass_available ? 1 : 0) << ',';
    out << e.grundy.value << '\n';
  }
  return out.str();
}

std::string GrundyTable::to_json() const {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    arr.push_back({{"piles", e.position.piles},
                   {"pass", e.position.pass_available ? 1 : 0},
                   {"grundy", e.grundy.value}});
  }
  return arr.dump();
}

}  // namespace maxnim
