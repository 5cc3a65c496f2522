#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "json.hpp"
#include "maxnim/oracle.hpp"
#include "support/naive_oracle.hpp"

using namespace maxnim;
using maxnim::testing::NaiveOracle;

TEST_CASE("oracle examples") {
  OracleSession plain(RuleSequence::half_ceiling(), false);
  CHECK(plain.grundy({{0}}).value == 0);
  CHECK(plain.grundy({{3}}).value == 2);
  OracleSession pass(RuleSequence::half_ceiling(), true);
  CHECK(pass.grundy({{1, 1, 1}, true}).value == 0);
  CHECK(pass.grundy({{2}, true}).value == 1);
}

TEST_CASE("oracle matches the naive recursion") {
  for (bool variant : {false, true}) {
    OracleSession oracle(RuleSequence::half_ceiling(), variant);
    auto naive = NaiveOracle::half(variant);
    for (Stones a = 0; a <= 9; ++a)
      for (Stones b = 0; b <= 9; ++b)
        for (Stones c = 0; c <= 9; ++c)
          for (bool p : {false, true}) {
            REQUIRE(oracle.grundy({{a, b, c}, p}).value == naive({a, b, c}, p));
          }
  }

  OracleSession full(RuleSequence::full(), true);
  NaiveOracle naive_full([](std::uint64_t m) { return m; }, true);
  for (Stones a = 0; a <= 8; ++a)
    for (Stones b = 0; b <= 8; ++b) CHECK(full.grundy({{a, b}, true}).value == naive_full({a, b}, true));
}

TEST_CASE("pass flag is ignored by a pass-free session") {
  OracleSession oracle(RuleSequence::half_ceiling(), false);
  for (Stones t = 0; t < 50; ++t) CHECK(oracle.grundy({{t}, true}) == oracle.grundy({{t}, false}));
}

TEST_CASE("cold memo reproduces warm memo") {
  OracleSession warm(RuleSequence::half_ceiling(), true);
  std::vector<std::uint64_t> first;
  for (Stones a = 0; a <= 14; ++a)
    for (Stones b = 0; b <= 14; ++b) first.push_back(warm.grundy({{a, b}, true}).value);

  // Reverse order, fresh session per position.
  std::size_t i = first.size();
  for (Stones a = 15; a-- > 0;)
    for (Stones b = 15; b-- > 0;) {
      OracleSession cold(RuleSequence::half_ceiling(), true);
      CHECK(cold.grundy({{a, b}, true}).value == first[--i]);
    }
}

TEST_CASE("permutation invariance for three piles up to 12") {
  OracleSession ordered(RuleSequence::half_ceiling(), true);
  for (Stones a = 0; a <= 12; ++a)
    for (Stones b = 0; b <= 12; ++b)
      for (Stones c = 0; c <= 12; ++c)
        for (bool p : {false, true}) {
          std::vector<Stones> piles{a, b, c};
          const auto g = ordered.grundy({piles, p});
          std::sort(piles.begin(), piles.end());
          do {
            REQUIRE(ordered.grundy({piles, p}) == g);
          } while (std::next_permutation(piles.begin(), piles.end()));
        }
}

TEST_CASE("oracle sum rule on three piles up to 25") {
  OracleSession oracle(RuleSequence::half_ceiling(), false);
  for (Stones s = 0; s <= 25; ++s)
    for (Stones t = 0; t <= 25; ++t)
      for (Stones u = 0; u <= 25; ++u) {
        const auto whole = oracle.grundy({{s, t, u}});
        const auto parts = oracle.grundy({{s}}) ^ oracle.grundy({{t}}) ^ oracle.grundy({{u}});
        REQUIRE(whole == parts);
      }
}

TEST_CASE("consumed pass equals the pass-free game") {
  OracleSession with(RuleSequence::half_ceiling(), true);
  OracleSession without(RuleSequence::half_ceiling(), false);
  for (Stones a = 0; a <= 20; ++a)
    for (Stones b = 0; b <= 20; ++b) CHECK(with.grundy({{a, b}, false}) == without.grundy({{a, b}}));
}

TEST_CASE("deep single-pile chain does not exhaust the call stack") {
  // f(m) = min(m,1) gives a chain of depth t with one move per state.
  OracleSession oracle(RuleSequence::custom("min1", [](Stones m) { return std::min<Stones>(m, 1); }), false);
  CHECK(oracle.grundy({{1'000'000}}).value == 0);
  CHECK(oracle.grundy({{999'999}}).value == 1);
  CHECK(oracle.stats().states_evaluated == 1'000'001);
}

TEST_CASE("memo capacity is a reported error") {
  OracleSession oracle(RuleSequence::half_ceiling(), false, 10);
  CHECK_THROWS_AS(oracle.grundy({{100}}), ResourceBoundError);
  CHECK(oracle.memo_size() <= 10);
  // What did fit stays valid and usable.
  CHECK(oracle.grundy({{3}}).value == 2);

  OracleSession small(RuleSequence::half_ceiling(), true, 100);
  CHECK_THROWS_AS(small.table(3, 10, true), ResourceBoundError);
  CHECK_THROWS_AS(small.table(40, UINT64_MAX, true), ResourceBoundError);
}

TEST_CASE("oracle accepts non-regular rules") {
  auto jumpy = RuleSequence::custom("jumpy", [](Stones m) { return m >= 4 ? Stones{3} : Stones{0}; });
  REQUIRE_FALSE(validate_regular(jumpy, 10).ok);
  OracleSession oracle(jumpy, false);
  NaiveOracle naive([](std::uint64_t m) { return m >= 4 ? 3 : 0; }, false);
  for (Stones t = 0; t < 60; ++t) CHECK(oracle.grundy({{t}}).value == naive({t}, false));
}

TEST_CASE("stats count memo hits") {
  OracleSession oracle(RuleSequence::half_ceiling(), false);
  oracle.grundy({{10}});
  const auto evaluated = oracle.stats().states_evaluated;
  CHECK(evaluated == 11);
  oracle.grundy({{10}});
  CHECK(oracle.stats().states_evaluated == evaluated);
  CHECK(oracle.stats().memo_hits > 0);
  oracle.clear();
  CHECK(oracle.memo_size() == 0);
  CHECK(oracle.stats().states_evaluated == 0);
}

TEST_CASE("table: one pile up to 2 with pass states") {
  OracleSession oracle(RuleSequence::half_ceiling(), true);
  const auto t = oracle.table(1, 2, true);
  REQUIRE(t.entries.size() == 6);
  // Piles major, pass flag minor.
  const std::vector<std::tuple<Stones, bool, std::uint64_t>> expected{
      {0, false, 0}, {0, true, 0}, {1, false, 1}, {1, true, 2}, {2, false, 0}, {2, true, 1}};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& [pile, pass, g] = expected[i];
    CHECK(t.entries[i].position == Position{{pile}, pass});
    CHECK(t.entries[i].grundy.value == g);
  }
  CHECK(t.to_csv() == "pile_1,pass,grundy\n0,0,0\n0,1,0\n1,0,1\n1,1,2\n2,0,0\n2,1,1\n");
  CHECK(t.to_json() ==
        R"([{"piles":[0],"pass":0,"grundy":0},{"piles":[0],"pass":1,"grundy":0},)"
        R"({"piles":[1],"pass":0,"grundy":1},{"piles":[1],"pass":1,"grundy":2},)"
        R"({"piles":[2],"pass":0,"grundy":0},{"piles":[2],"pass":1,"grundy":1}])");
}

TEST_CASE("table: trivial and small boxes") {
  OracleSession plain(RuleSequence::half_ceiling(), false);
  const auto t = plain.table(1, 0, false);
  REQUIRE(t.entries.size() == 1);
  CHECK(t.entries[0].grundy.value == 0);
  CHECK(t.to_csv() == "pile_1,grundy\n0,0\n");
  CHECK_THROWS_AS(plain.table(1, 3, true), Error);
  CHECK_THROWS_AS(plain.table(0, 3, false), Error);

  OracleSession pass(RuleSequence::half_ceiling(), true);
  const auto box = pass.table(3, 1, true);
  REQUIRE(box.entries.size() == 16);
  // Lexicographic piles, last pile fastest.
  CHECK(box.entries[2].position == Position{{0, 0, 1}, false});
  CHECK(box.entries[15].position == Position{{1, 1, 1}, true});
  CHECK(box.entries[15].grundy.value == 0);
  auto parsed = nlohmann::json::parse(box.to_json());
  CHECK(parsed.size() == 16);
  CHECK(box.to_csv().substr(0, 30) == "pile_1,pile_2,pile_3,pass,grun");
}
