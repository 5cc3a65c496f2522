#include "maxnim/service.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "httplib.h"

namespace maxnim {

namespace {

constexpr std::size_t kMaxListedLegalMoves = 10'000;
constexpr std::size_t kMaxPiles = 64;

std::string_view to_string(Player p) { return p == Player::human ? "human" : "engine"; }

Player parse_player(const Json& j) {
  if (j == "human") return Player::human;
  if (j == "engine") return Player::engine;
  throw ParseError("unknown player " + j.dump());
}

Player other(Player p) { return p == Player::human ? Player::engine : Player::human; }

Json error_body(std::string message) { return Json{{"error", std::move(message)}}; }

std::vector<Stones> piles_from_json(const Json& j) {
  if (j.is_string()) return parse_piles(j.get<std::string>());
  if (!j.is_array() || j.empty()) throw ParseError("piles must be a non-empty array or a \"3,5,7\" string");
  std::vector<Stones> piles;
  for (const auto& v : j) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ParseError("pile " + v.dump() + " is not a non-negative integer");
    }
    const auto p = v.get<std::uint64_t>();
    if (p > kDefaultPileLimit) throw ParseError("pile " + v.dump() + " exceeds the limit");
    piles.push_back(p);
  }
  return piles;
}

bool flag_from_json(const Json& j, const char* name, bool fallback) {
  if (j.is_null()) return fallback;
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer() && (j == 0 || j == 1)) return j == 1;
  throw ParseError(std::string(name) + " must be a boolean");
}

Json position_to_json(const Position& p) {
  return Json{{"piles", p.piles}, {"pass_available", p.pass_available}};
}

Position position_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("position must be an object");
  return Position{piles_from_json(j.at("piles")), j.at("pass_available").get<bool>()};
}

}  // namespace

Json move_to_json(const Move& m) {
  if (auto* r = std::get_if<Remove>(&m)) {
    return Json{{"type", "remove"}, {"pile", r->pile}, {"count", r->count}};
  }
  return Json{{"type", "pass"}};
}

Move move_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ParseError("move must be an object with a \"type\"");
  }
  const auto type = j["type"].get<std::string>();
  if (type == "pass") return Pass{};
  if (type != "remove") throw ParseError("unknown move type '" + type + "'");
  const auto& pile = j.contains("pile") ? j["pile"] : Json();
  const auto& count = j.contains("count") ? j["count"] : Json();
  if (!pile.is_number_unsigned() || !count.is_number_unsigned()) {
    throw ParseError("remove needs non-negative integer \"pile\" and \"count\"");
  }
  return Remove{pile.get<std::size_t>(), count.get<Stones>()};
}

Json analysis_to_json(const Position& pos, const Analysis& a) {
  return Json{{"piles", pos.piles},
              {"pass", pos.pass_available ? 1 : 0},
              {"grundy", a.grundy.value},
              {"outcome", to_string(a.outcome)},
              {"best", a.best ? move_to_json(*a.best) : Json()},
              {"evaluator_used", to_string(a.evaluator_used)}};
}

Json session_to_json(const GameSession& s) {
  auto history = Json::array();
  for (const auto& [mover, move] : s.history) {
    history.push_back({{"mover", to_string(mover)}, {"move", move_to_json(move)}});
  }
  return Json{{"id", s.id},
              {"rule", "half"},
              {"pass_variant", s.pass_variant},
              {"initial", position_to_json(s.initial)},
              {"position", position_to_json(s.position)},
              {"to_move", s.finished ? Json() : Json(to_string(s.to_move))},
              {"history", std::move(history)},
              {"status", s.finished ? "finished" : "ongoing"},
              {"winner", s.winner ? Json(to_string(*s.winner)) : Json()}};
}

GameService::GameService(ServiceConfig config, Clock clock)
    : config_(std::move(config)),
      clock_(clock ? std::move(clock) : Clock([] { return std::chrono::steady_clock::now(); })),
      engine_(std::make_unique<Engine>(RuleSequence::half_ceiling(), true, Method::closed)),
      id_rng_(std::random_device{}()) {}

std::string GameService::new_id() {
  std::lock_guard lock(id_mutex_);
  std::ostringstream out;
  out << std::hex << std::setfill('0') << std::setw(16) << id_rng_() << std::setw(16) << id_rng_();
  return out.str();
}

std::shared_ptr<GameService::Entry> GameService::find(const std::string& id) {
  std::lock_guard lock(store_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  const auto now = clock_();
  if (now - it->second->last_access > config_.ttl) {
    sessions_.erase(it);
    return nullptr;
  }
  it->second->last_access = now;
  return it->second;
}

void GameService::play(GameSession& s, Player mover, const Move& m) {
  const auto rule = RuleSequence::half_ceiling();
  s.position = apply_move(s.position, m, rule, s.pass_variant);
  s.history.emplace_back(mover, m);
  s.to_move = other(mover);
  if (is_terminal(s.position, rule, s.pass_variant)) {
    s.finished = true;
    s.winner = mover;
  }
}

void GameService::engine_reply(GameSession& s) {
  if (s.finished || s.to_move != Player::engine) return;
  play(s, Player::engine, engine_->choose_move(s.position));
}

ServiceResponse GameService::create_game(const Json& body) {
  GameSession s;
  try {
    if (!body.is_object() || !body.contains("piles")) throw ParseError("body must contain \"piles\"");
    auto piles = piles_from_json(body["piles"]);
    if (piles.size() > kMaxPiles) throw ParseError("at most " + std::to_string(kMaxPiles) + " piles");
    s.pass_variant = flag_from_json(body.value("pass", Json()), "pass", false);
    const bool human_first = flag_from_json(body.value("human_first", Json()), "human_first", true);
    s.initial = Position{std::move(piles), s.pass_variant};
    s.to_move = human_first ? Player::human : Player::engine;
  } catch (const ParseError& e) {
    return {400, error_body(e.what())};
  } catch (const nlohmann::json::exception& e) {
    return {400, error_body(e.what())};
  }
  s.position = s.initial;
  s.id = new_id();

  const auto rule = RuleSequence::half_ceiling();
  if (is_terminal(s.position, rule, s.pass_variant)) {
    s.finished = true;
    s.winner = other(s.to_move);
  } else {
    engine_reply(s);
  }

  auto entry = std::make_shared<Entry>();
  entry->session = std::move(s);
  entry->last_access = clock_();
  Json out = session_to_json(entry->session);
  {
    std::lock_guard lock(store_mutex_);
    sessions_[entry->session.id] = entry;
  }
  return {201, std::move(out)};
}

ServiceResponse GameService::get_game(const std::string& id) {
  auto entry = find(id);
  if (!entry) return {404, error_body("unknown game '" + id + "'")};
  std::lock_guard lock(entry->mutex);
  return {200, session_to_json(entry->session)};
}

ServiceResponse GameService::post_move(const std::string& id, const Json& body) {
  auto entry = find(id);
  if (!entry) return {404, error_body("unknown game '" + id + "'")};

  Move move;
  try {
    const Json& action = body.is_object() && body.contains("action") ? body["action"] : body;
    move = move_from_json(action);
  } catch (const ParseError& e) {
    return {400, error_body(e.what())};
  }

  std::lock_guard lock(entry->mutex);
  GameSession& s = entry->session;
  if (s.finished) return {409, error_body("game is finished")};
  if (s.to_move != Player::human) return {409, error_body("not the human's turn")};

  const auto rule = RuleSequence::half_ceiling();
  if (!is_legal(s.position, move, rule, s.pass_variant)) {
    Json body_out = error_body("illegal move '" + maxnim::to_string(move) + "'");
    auto legal = Json::array();
    bool truncated = false;
    for (const auto& m : legal_moves(s.position, rule, s.pass_variant)) {
      if (legal.size() == kMaxListedLegalMoves) {
        truncated = true;
        break;
      }
      legal.push_back(move_to_json(m));
    }
    body_out["legal_moves"] = std::move(legal);
    if (truncated) body_out["legal_moves_truncated"] = true;
    return {409, std::move(body_out)};
  }

  play(s, Player::human, move);
  engine_reply(s);
  return {200, session_to_json(s)};
}

ServiceResponse GameService::analyze(const std::optional<std::string>& piles,
                                     const std::optional<std::string>& pass) const {
  if (!piles) return {400, error_body("missing query parameter 'piles'")};
  Position pos;
  try {
    pos.piles = parse_piles(*piles);
    if (pos.piles.size() > kMaxPiles) throw ParseError("at most " + std::to_string(kMaxPiles) + " piles");
  } catch (const ParseError& e) {
    return {400, error_body(e.what())};
  }
  if (pass) {
    if (*pass == "1" || *pass == "true") {
      pos.pass_available = true;
    } else if (!(*pass == "0" || *pass == "false")) {
      return {400, error_body("pass must be 0 or 1")};
    }
  }
  return {200, analysis_to_json(pos, engine_->analyze(pos))};
}

std::size_t GameService::purge_expired() {
  std::lock_guard lock(store_mutex_);
  const auto now = clock_();
  return std::erase_if(sessions_, [&](const auto& kv) { return now - kv.second->last_access > config_.ttl; });
}

std::size_t GameService::session_count() const {
  std::lock_guard lock(store_mutex_);
  return sessions_.size();
}

Json GameService::snapshot() const {
  std::vector<std::shared_ptr<Entry>> entries;
  {
    std::lock_guard lock(store_mutex_);
    for (const auto& [id, e] : sessions_) entries.push_back(e);
  }
  auto list = Json::array();
  for (const auto& e : entries) {
    std::lock_guard lock(e->mutex);
    list.push_back(session_to_json(e->session));
  }
  return Json{{"sessions", std::move(list)}};
}

void GameService::restore(const Json& snapshot) {
  std::vector<std::shared_ptr<Entry>> loaded;
  try {
    for (const auto& j : snapshot.at("sessions")) {
      GameSession s;
      s.id = j.at("id").get<std::string>();
      s.pass_variant = j.at("pass_variant").get<bool>();
      s.initial = position_from_json(j.at("initial"));
      s.position = s.initial;
      const auto& history = j.at("history");
      // Whoever moved first is recorded in the history; an empty history
      // leaves the stored to_move in charge.
      s.to_move = history.empty() ? (j.at("to_move").is_null() ? Player::human : parse_player(j.at("to_move")))
                                  : parse_player(history.front().at("mover"));
      const auto rule = RuleSequence::half_ceiling();
      if (is_terminal(s.position, rule, s.pass_variant)) {
        s.finished = true;
        s.winner = other(s.to_move);
      }
      for (const auto& h : history) {
        const Player mover = parse_player(h.at("mover"));
        if (s.finished || mover != s.to_move) throw ParseError("session " + s.id + ": history out of turn");
        const Move m = move_from_json(h.at("move"));
        if (!is_legal(s.position, m, rule, s.pass_variant)) {
          throw ParseError("session " + s.id + ": history holds illegal move");
        }
        play(s, mover, m);
      }
      if (s.position != position_from_json(j.at("position")) ||
          (j.at("status") == "finished") != s.finished) {
        throw ParseError("session " + s.id + ": replayed history disagrees with stored position");
      }
      auto e = std::make_shared<Entry>();
      e->session = std::move(s);
      loaded.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed snapshot: ") + e.what());
  }
  std::lock_guard lock(store_mutex_);
  const auto now = clock_();
  for (auto& e : loaded) {
    e->last_access = now;
    sessions_[e->session.id] = std::move(e);
  }
}

void GameService::save_snapshot(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write snapshot '" + path + "'");
  out << snapshot().dump(2) << '\n';
}

bool GameService::load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) return false;
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("snapshot '" + path + "' is not valid JSON: " + e.what());
  }
  restore(j);
  return true;
}

// ---------------------------------------------------------------------------

namespace {

void send(httplib::Response& res, const ServiceResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

std::optional<Json> parse_body(const httplib::Request& req, httplib::Response& res) {
  try {
    return Json::parse(req.body);
  } catch (const nlohmann::json::exception&) {
    send(res, {400, error_body("request body is not valid JSON")});
    return std::nullopt;
  }
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

}  // namespace

HttpServer::HttpServer(GameService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto& svr = *server_;

  svr.Post("/api/games", [this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) send(res, service_.create_game(*body));
  });
  svr.Get(R"(/api/games/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.get_game(req.matches[1]));
  });
  svr.Post(R"(/api/games/([^/]+)/move)", [this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) send(res, service_.post_move(req.matches[1], *body));
  });
  svr.Get("/api/analyze", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.analyze(param(req, "piles"), param(req, "pass")));
  });
  svr.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  svr.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
    const auto& origin = service_.config().cors_origin;
    if (origin.empty()) return;
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send(res, {500, error_body(what)});
  });
}

HttpServer::~HttpServer() = default;

bool HttpServer::listen(const std::string& host, int port) { return server_->listen(host, port); }
int HttpServer::bind_to_any_port(const std::string& host) { return server_->bind_to_any_port(host); }
bool HttpServer::listen_after_bind() { return server_->listen_after_bind(); }
void HttpServer::wait_until_ready() const { server_->wait_until_ready(); }
void HttpServer::stop() { server_->stop(); }

}  // namespace maxnim
