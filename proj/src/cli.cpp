#include "maxnim/cli.hpp"

#include <algorithm>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <pthread.h>

#include "CLI11.hpp"
#include "maxnim/closed_form.hpp"
#include "maxnim/oracle.hpp"
#include "maxnim/service.hpp"
#include "maxnim/verify.hpp"

namespace maxnim::cli {

namespace {

RuleSequence load_rule(const std::string& spec) {
  auto rule = RuleSequence::from_spec(spec);
  if (rule.kind() == RuleKind::custom) {
    const Stones bound = rule.domain_limit().value_or(10'000);
    if (auto check = validate_regular(rule, bound); !check) {
      throw NonRegularRuleError("rule '" + rule.name() + "' is not regular at m = " +
                                std::to_string(*check.first_violation));
    }
  }
  return rule;
}

std::string describe(const Move& m) {
  if (auto* r = std::get_if<Remove>(&m)) {
    return "take " + std::to_string(r->pile + 1) + " " + std::to_string(r->count);
  }
  return "pass";
}

void show_position(std::ostream& out, const Position& pos, bool pass_variant) {
  out << "piles:";
  for (std::size_t i = 0; i < pos.piles.size(); ++i) out << ' ' << (i + 1) << ':' << pos.piles[i];
  if (pass_variant) out << "  pass: " << (pos.pass_available ? "available" : "used");
  out << '\n';
}

// ---------------------------------------------------------------------------

struct GrundyArgs {
  std::string piles;
  bool pass = false;
  std::string method = "auto";
  std::string rule = "half";
  bool json = false;
  std::size_t memo_capacity = kDefaultMemoCapacity;
};

int cmd_grundy(const GrundyArgs& a, std::ostream& out) {
  const auto rule = load_rule(a.rule);
  Position pos{parse_piles(a.piles), a.pass};
  Engine engine(rule, a.pass, parse_method(a.method), a.memo_capacity);
  const auto analysis = engine.analyze(pos);
  if (a.json) {
    auto doc = analysis_to_json(pos, analysis);
    doc["rule"] = rule.name();
    out << doc.dump() << '\n';
    return kOk;
  }
  out << "piles: " << format_piles(pos.piles) << "  pass: " << (pos.pass_available ? 1 : 0) << '\n'
      << "grundy: " << analysis.grundy.value << '\n'
      << "outcome: " << to_string(analysis.outcome) << '\n'
      << "best: " << (analysis.best ? to_string(*analysis.best) : std::string("none")) << '\n'
      << "evaluator: " << to_string(analysis.evaluator_used) << '\n';
  return kOk;
}

struct TableArgs {
  std::size_t piles = 1;
  Stones max = 0;
  bool pass = false;
  std::string format = "csv";
  std::string out_path;
  std::string rule = "half";
  std::size_t memo_capacity = kDefaultMemoCapacity;
};

int cmd_table(const TableArgs& a, std::ostream& out) {
  const auto rule = load_rule(a.rule);
  OracleSession oracle(rule, a.pass, a.memo_capacity);
  const auto table = oracle.table(a.piles, a.max, a.pass);
  const std::string text = a.format == "json" ? table.to_json() + "\n" : table.to_csv();
  if (a.out_path.empty()) {
    out << text;
  } else {
    std::ofstream file(a.out_path, std::ios::trunc);
    if (!file) throw Error("cannot write '" + a.out_path + "'");
    file << text;
  }
  return kOk;
}

struct VerifyArgs {
  std::string suite;
  std::optional<Stones> t_max;
  std::size_t piles = 3;
  std::optional<Stones> max;
  std::uint64_t seed = 1;
  std::size_t rules = 20;
  unsigned workers = 0;
  bool no_timing = false;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  VerifyOptions opts;
  opts.workers = a.workers;
  std::vector<VerificationReport> reports;
  const auto run = [&](const std::string& suite) {
    if (suite == "half-single") {
      reports.push_back(verify_half_single(a.t_max.value_or(5000), opts));
    } else if (suite == "pass-single") {
      reports.push_back(verify_pass_single(a.t_max.value_or(5000), opts));
    } else if (suite == "sum") {
      reports.push_back(verify_sum(a.piles, a.max.value_or(40), opts));
    } else if (suite == "pass-multi") {
      reports.push_back(verify_pass_multi(a.piles, a.max.value_or(30), opts));
    } else if (suite == "levine") {
      reports.push_back(verify_levine(a.seed, a.rules, a.t_max.value_or(2000), opts));
    } else if (suite == "small-cases") {
      reports.push_back(verify_small_cases());
    }
  };
  if (a.suite == "all") {
    for (const char* s : {"half-single", "pass-single", "sum", "pass-multi", "levine", "small-cases"}) run(s);
  } else {
    run(a.suite);
  }

  bool ok = true;
  if (a.suite == "all") {
    out << '[';
    for (std::size_t i = 0; i < reports.size(); ++i) {
      if (i) out << ',';
      out << reports[i].to_json(!a.no_timing);
    }
    out << "]\n";
  } else {
    out << reports.front().to_json(!a.no_timing) << '\n';
  }
  for (const auto& r : reports) ok = ok && r.passed();
  return ok ? kOk : kVerificationFailed;
}

struct PlayArgs {
  std::string piles = "5,5,5";
  bool pass = false;
  bool engine_first = false;
  std::string rule = "half";
};

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  long ttl = 3600;
  std::string snapshot;
  std::string cors_origin = "*";
};

int cmd_serve(const ServeArgs& a, std::ostream& err) {
  // Route SIGINT/SIGTERM to a waiter thread so shutdown can save the snapshot.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  GameService service(ServiceConfig{std::chrono::seconds(a.ttl), a.cors_origin});
  if (!a.snapshot.empty() && service.load_snapshot(a.snapshot)) {
    err << "loaded " << service.session_count() << " sessions from " << a.snapshot << '\n';
  }
  HttpServer server(service);

  std::jthread waiter([&server, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });

  err << "listening on " << a.host << ':' << a.port << '\n';
  const bool ok = server.listen(a.host, a.port);
  if (!ok) {
    err << "cannot listen on " << a.host << ':' << a.port << '\n';
    pthread_kill(waiter.native_handle(), SIGTERM);
    return kUsage;
  }
  if (!a.snapshot.empty()) {
    service.save_snapshot(a.snapshot);
    err << "saved " << service.session_count() << " sessions to " << a.snapshot << '\n';
  }
  return kOk;
}

}  // namespace

int play_loop(Position start, const RuleSequence& rule, bool pass_variant, bool engine_first,
              std::istream& in, std::ostream& out) {
  Engine engine(rule, pass_variant);
  Position pos = std::move(start);
  pos.pass_available = pass_variant;

  out << "maximum nim, rule " << rule.name() << (pass_variant ? ", one pass available" : "") << '\n'
      << "commands: take <pile> <count>, pass, hint, show, help, quit\n";

  bool engine_turn = engine_first;
  while (true) {
    if (is_terminal(pos, rule, pass_variant)) {
      show_position(out, pos, pass_variant);
      // The side to move has no move and loses.
      out << (engine_turn ? "game over: you win\n" : "game over: engine wins\n");
      return kOk;
    }
    if (engine_turn) {
      const Move m = engine.choose_move(pos);
      pos = apply_move(pos, m, rule, pass_variant);
      out << "engine: " << describe(m) << '\n';
      engine_turn = false;
      continue;
    }

    show_position(out, pos, pass_variant);
    out << "> " << std::flush;
    std::string line;
    if (!std::getline(in, line)) {
      out << '\n';
      return kOk;
    }
    std::istringstream words(line);
    std::string cmd;
    words >> cmd;
    if (cmd.empty()) continue;
    if (cmd == "quit" || cmd == "exit") return kOk;
    if (cmd == "help") {
      out << "take <pile> <count>  remove count stones from pile (piles numbered from 1)\n"
             "pass                 use the one-time pass\n"
             "hint                 show the Grundy value and the engine's suggestion\n";
      continue;
    }
    if (cmd == "show") continue;
    if (cmd == "hint") {
      const auto a = engine.analyze(pos);
      out << "grundy " << a.grundy.value << ", outcome " << to_string(a.outcome) << ", "
          << (a.best ? "winning move: " + describe(*a.best) : std::string("no winning move")) << '\n';
      continue;
    }

    Move m = Pass{};
    if (cmd == "take") {
      std::size_t pile = 0;
      Stones count = 0;
      if (!(words >> pile >> count) || pile == 0) {
        out << "usage: take <pile> <count>\n";
        continue;
      }
      m = Remove{pile - 1, count};
    } else if (cmd != "pass") {
      out << "unknown command '" << cmd << "' (try help)\n";
      continue;
    }
    if (!is_legal(pos, m, rule, pass_variant)) {
      out << "illegal move: " << describe(m) << '\n';
      continue;
    }
    pos = apply_move(pos, m, rule, pass_variant);
    out << "you: " << describe(m) << '\n';
    engine_turn = true;
  }
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maximum Nim engine: Grundy values, tables, verification, play and service", "maxnim"};
  app.require_subcommand(1);

  GrundyArgs g;
  auto* grundy = app.add_subcommand("grundy", "Analyze one position");
  grundy->add_option("--piles", g.piles, "Pile sizes, e.g. 3,5,7")->required();
  grundy->add_flag("--pass", g.pass, "Pass move available");
  grundy->add_option("--method", g.method, "auto|closed|oracle")
      ->check(CLI::IsMember({"auto", "closed", "oracle"}));
  grundy->add_option("--rule", g.rule, "half|full|file:PATH");
  grundy->add_flag("--json", g.json, "Single JSON document on stdout");
  grundy->add_option("--memo-capacity", g.memo_capacity, "Oracle state limit");

  TableArgs t;
  auto* table = app.add_subcommand("table", "Tabulate oracle Grundy values over a box");
  table->add_option("--piles", t.piles, "Number of piles")->required()->check(CLI::PositiveNumber);
  table->add_option("--max", t.max, "Largest pile size")->required();
  table->add_flag("--pass", t.pass, "Include pass-available states");
  table->add_option("--format", t.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  table->add_option("--out", t.out_path, "Write to FILE instead of stdout");
  table->add_option("--rule", t.rule, "half|full|file:PATH");
  table->add_option("--memo-capacity", t.memo_capacity, "Oracle state limit");

  VerifyArgs v;
  auto* verify = app.add_subcommand("verify", "Run an oracle vs closed-form sweep");
  verify->add_option("suite", v.suite, "half-single|pass-single|sum|pass-multi|levine|small-cases|all")
      ->required()
      ->check(CLI::IsMember({"half-single", "pass-single", "sum", "pass-multi", "levine", "small-cases", "all"}));
  verify->add_option("--t-max", v.t_max, "Largest single pile (default 5000, levine 2000)");
  verify->add_option("--piles", v.piles, "Number of piles for sum/pass-multi")->check(CLI::PositiveNumber);
  verify->add_option("--max", v.max, "Largest pile for sum (default 40) / pass-multi (default 30)");
  verify->add_option("--seed", v.seed, "Seed for random regular rules");
  verify->add_option("--rules", v.rules, "Number of random regular rules");
  verify->add_option("--workers", v.workers, "Worker threads (default: all cores)");
  verify->add_flag("--no-timing", v.no_timing, "Omit elapsed_ms for reproducible output");

  PlayArgs p;
  auto* play = app.add_subcommand("play", "Play against the engine in the terminal");
  play->add_option("--piles", p.piles, "Starting piles");
  play->add_flag("--pass", p.pass, "Allow the one-time pass");
  play->add_flag("--engine-first", p.engine_first, "Engine makes the first move");
  play->add_option("--rule", p.rule, "half|full|file:PATH");

  ServeArgs s;
  auto* serve = app.add_subcommand("serve", "Run the HTTP game service");
  serve->add_option("--port", s.port, "TCP port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", s.host, "Bind address");
  serve->add_option("--ttl", s.ttl, "Idle session lifetime in seconds")->check(CLI::PositiveNumber);
  serve->add_option("--snapshot", s.snapshot, "Load sessions from FILE at start, save at shutdown");
  serve->add_option("--cors-origin", s.cors_origin, "Access-Control-Allow-Origin value ('' disables)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (grundy->parsed()) return cmd_grundy(g, out);
    if (table->parsed()) return cmd_table(t, out);
    if (verify->parsed()) return cmd_verify(v, out);
    if (play->parsed()) {
      const auto rule = load_rule(p.rule);
      return play_loop(Position{parse_piles(p.piles), p.pass}, rule, p.pass, p.engine_first, in, out);
    }
    if (serve->parsed()) return cmd_serve(s, err);
  } catch (const ResourceBoundError& e) {
    err << "error: " << e.what() << '\n';
    return kResourceBound;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace maxnim::cli
