#include "maxnim/verify.hpp"

#include <algorithm>
#include <random>
#include <thread>

#include "json.hpp"
#include "maxnim/closed_form.hpp"

namespace maxnim {

void VerificationReport::record(Failure f) {
  ++failure_count;
  if (failures.size() < kMaxReportedFailures) failures.push_back(std::move(f));
}

std::string VerificationReport::to_json(bool include_timing) const {
  nlohmann::ordered_json doc;
  doc["suite"] = suite;
  doc["domain"] = domain;
  doc["checked"] = checked;
  auto list = nlohmann::ordered_json::array();
  for (const auto& f : failures) {
    list.push_back({{"piles", f.position.piles},
                    {"pass", f.position.pass_available ? 1 : 0},
                    {"expected", f.expected},
                    {"got", f.got}});
  }
  doc["failures"] = std::move(list);
  if (include_timing) doc["elapsed_ms"] = elapsed.count();
  return doc.dump();
}

namespace {

using Clock = std::chrono::steady_clock;

std::chrono::milliseconds since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
}

VerificationReport make_report(std::string suite, std::string domain) {
  VerificationReport r;
  r.suite = std::move(suite);
  r.domain = std::move(domain);
  return r;
}

unsigned worker_count(const VerifyOptions& opts, std::size_t shards) {
  unsigned w = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(1, shards)));
}

void check(VerificationReport& r, Position pos, GrundyValue expected, GrundyValue got) {
  ++r.checked;
  if (expected != got) r.record({std::move(pos), expected.value, got.value});
}

// Partial result of one shard of a box sweep.
struct ShardResult {
  std::uint64_t checked = 0;
  std::vector<Failure> failures;  // in domain order, uncapped count kept separately
  std::uint64_t failure_count = 0;
};

// Sweeps [0,max]^n (first pile fixed per shard) comparing the oracle with
// `closed`. Shards are merged in first-pile order so the report does not
// depend on the number of workers.
VerificationReport sweep_box(std::string suite, std::size_t n, Stones max_per_pile, bool pass_states,
                             const VerifyOptions& opts,
                             GrundyValue (*closed)(const Position&)) {
  const auto start = Clock::now();
  if (n == 0) throw Error("suite needs at least one pile");
  VerificationReport report;
  report.suite = std::move(suite);
  report.domain = "piles=" + std::to_string(n) + " max=" + std::to_string(max_per_pile) +
                  (pass_states ? " pass=0,1" : " pass=none");

  const std::size_t shards = static_cast<std::size_t>(max_per_pile) + 1;
  std::vector<ShardResult> results(shards);

  auto run_shard = [&](OracleSession& oracle, std::size_t shard) {
    ShardResult& out = results[shard];
    std::vector<Stones> piles(n, 0);
    piles[0] = shard;
    while (true) {
      for (int pass = 0; pass <= (pass_states ? 1 : 0); ++pass) {
        Position pos{piles, pass == 1};
        const auto expected = oracle.grundy(pos);
        const auto got = closed(pos);
        ++out.checked;
        if (expected != got) {
          ++out.failure_count;
          if (out.failures.size() < kMaxReportedFailures) {
            out.failures.push_back({std::move(pos), expected.value, got.value});
          }
        }
      }
      std::size_t i = n;
      while (i > 1 && piles[i - 1] == max_per_pile) piles[--i] = 0;
      if (i == 1) break;
      ++piles[i - 1];
    }
  };

  const unsigned workers = worker_count(opts, shards);
  {
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          OracleSession oracle(RuleSequence::half_ceiling(), pass_states, opts.memo_capacity);
          for (std::size_t s = w; s < shards; s += workers) run_shard(oracle, s);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (auto& r : results) {
    report.checked += r.checked;
    for (auto& f : r.failures) {
      if (report.failures.size() < kMaxReportedFailures) report.failures.push_back(std::move(f));
    }
    report.failure_count += r.failure_count;
  }
  report.elapsed = since(start);
  return report;
}

GrundyValue closed_multi(const Position& p) { return half_grundy_multi(p.piles); }
GrundyValue closed_pass_multi(const Position& p) {
  return half_grundy_pass_multi(p.piles, p.pass_available);
}

}  // namespace

VerificationReport verify_half_single(Stones t_max, const VerifyOptions& opts) {
  const auto start = Clock::now();
  auto r = make_report("half_single", "t=0.." + std::to_string(t_max) + " pass=none");
  OracleSession oracle(RuleSequence::half_ceiling(), false, opts.memo_capacity);
  for (Stones t = 0; t <= t_max; ++t) {
    Position pos{{t}, false};
    check(r, pos, oracle.grundy(pos), half_grundy(t));
  }
  r.elapsed = since(start);
  return r;
}

VerificationReport verify_pass_single(Stones t_max, const VerifyOptions& opts) {
  const auto start = Clock::now();
  auto r = make_report("pass_single", "t=0.." + std::to_string(t_max) + " pass=1");
  OracleSession oracle(RuleSequence::half_ceiling(), true, opts.memo_capacity);
  for (Stones t = 0; t <= t_max; ++t) {
    Position pos{{t}, true};
    check(r, pos, oracle.grundy(pos), half_grundy_pass_single(t));
  }
  r.elapsed = since(start);
  return r;
}

VerificationReport verify_sum(std::size_t n, Stones max_per_pile, const VerifyOptions& opts) {
  return sweep_box("sum", n, max_per_pile, false, opts, closed_multi);
}

VerificationReport verify_pass_multi(std::size_t n, Stones max_per_pile, const VerifyOptions& opts) {
  return sweep_box("pass_multi", n, max_per_pile, true, opts, closed_pass_multi);
}

RuleSequence random_regular_rule(std::uint64_t seed, Stones t_max, std::string name) {
  std::mt19937_64 rng(seed);
  std::vector<Stones> caps(static_cast<std::size_t>(t_max) + 1, 0);
  std::uint64_t bits = 0;
  int left = 0;
  for (std::size_t m = 1; m < caps.size(); ++m) {
    if (left == 0) {
      bits = rng();
      left = 64;
    }
    caps[m] = caps[m - 1] + (bits & 1);
    bits >>= 1;
    --left;
  }
  return RuleSequence::from_table(std::move(name), std::move(caps));
}

VerificationReport verify_levine(std::uint64_t seed, std::size_t num_rules, Stones t_max,
                                 const VerifyOptions& opts) {
  const auto start = Clock::now();
  auto r = make_report("levine", "seed=" + std::to_string(seed) + " random_rules=" +
                                     std::to_string(num_rules) + " fixed=half,full,min1 t=0.." +
                                     std::to_string(t_max));

  std::vector<RuleSequence> rules{
      RuleSequence::half_ceiling(), RuleSequence::full(),
      RuleSequence::custom("min1", [](Stones m) { return std::min<Stones>(m, 1); })};
  for (std::size_t i = 0; i < num_rules; ++i) {
    rules.push_back(random_regular_rule(seed + i, t_max, "random#" + std::to_string(i)));
  }

  // Failures are listed rule by rule in the order above.
  std::vector<VerificationReport> parts(rules.size());
  const unsigned workers = worker_count(opts, rules.size());
  {
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t k = w; k < rules.size(); k += workers) {
            const auto& rule = rules[k];
            auto& part = parts[k];
            if (!validate_regular(rule, t_max)) {
              throw NonRegularRuleError("generated rule '" + rule.name() + "' is not regular");
            }
            OracleSession oracle(rule, false, opts.memo_capacity);
            for (Stones t = 0; t <= t_max; ++t) {
              Position pos{{t}, false};
              check(part, pos, oracle.grundy(pos), generic_regular_grundy_unchecked(t, rule));
            }
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  for (auto& p : parts) {
    r.checked += p.checked;
    for (auto& f : p.failures) {
      if (r.failures.size() < kMaxReportedFailures) r.failures.push_back(std::move(f));
    }
    r.failure_count += p.failure_count;
  }
  r.elapsed = since(start);
  return r;
}

const std::vector<SmallCase>& small_cases() {
  static const std::vector<SmallCase> cases{
      {{{0, 0, 0}, false}, 0}, {{{0, 0, 0}, true}, 0},
      {{{1, 0, 0}, false}, 1}, {{{0, 1, 0}, false}, 1}, {{{0, 0, 1}, false}, 1},
      {{{1, 1, 0}, false}, 0}, {{{0, 1, 1}, false}, 0}, {{{1, 0, 1}, false}, 0},
      {{{1, 1, 1}, false}, 1},
      {{{1, 0, 0}, true}, 2},  {{{0, 1, 0}, true}, 2},  {{{0, 0, 1}, true}, 2},
      {{{1, 1, 0}, true}, 1},  {{{0, 1, 1}, true}, 1},  {{{1, 0, 1}, true}, 1},
      {{{1, 1, 1}, true}, 0},
  };
  return cases;
}

VerificationReport verify_small_cases(const PositionEvaluator& closed) {
  const auto start = Clock::now();
  auto r = make_report("small_cases", "piles=3 max=1 pass=0,1 reference values");
  OracleSession oracle(RuleSequence::half_ceiling(), true);
  for (const auto& c : small_cases()) {
    const auto got_oracle = oracle.grundy(c.position);
    const auto got_closed = closed ? closed(c.position) : closed_pass_multi(c.position);
    ++r.checked;
    if (got_oracle.value != c.value) r.record({c.position, c.value, got_oracle.value});
    if (got_closed.value != c.value) r.record({c.position, c.value, got_closed.value});
  }
  r.elapsed = since(start);
  return r;
}

}  // namespace maxnim
