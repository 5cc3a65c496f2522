#pragma once

// JSON-over-HTTP game sessions against the optimal engine (half-ceiling rule).
//
// GameService holds all request logic and returns (status, body) pairs, so it
// can be driven directly; HttpServer binds it to cpp-httplib routes.

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "maxnim/core.hpp"
#include "maxnim/solver.hpp"

namespace httplib {
class Server;
}

namespace maxnim {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Wire format helpers (shared with the CLI's --json output)

/// `{"type":"remove","pile":i,"count":v}` or `{"type":"pass"}`.
Json move_to_json(const Move& m);
/// Inverse of move_to_json; throws ParseError on anything else.
Move move_from_json(const Json& j);
/// `{"piles":[..],"pass":0|1,"grundy":g,"outcome":"P"|"N","best":move|null,"evaluator_used":..}`
Json analysis_to_json(const Position& pos, const Analysis& a);

// ---------------------------------------------------------------------------

enum class Player { human, engine };

struct GameSession {
  std::string id;
  Position initial;
  Position position;
  bool pass_variant = true;
  Player to_move = Player::human;
  std::vector<std::pair<Player, Move>> history;
  bool finished = false;
  std::optional<Player> winner;
};

Json session_to_json(const GameSession& s);

struct ServiceConfig {
  std::chrono::seconds ttl{3600};
  /// Value of Access-Control-Allow-Origin; empty disables CORS headers.
  std::string cors_origin = "*";
};

struct ServiceResponse {
  int status = 200;
  Json body;
};

class GameService {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  explicit GameService(ServiceConfig config = {}, Clock clock = {});

  /// POST /api/games  {"piles":[..]|"3,5","pass":bool,"human_first":bool}
  ServiceResponse create_game(const Json& body);
  /// GET /api/games/{id}
  ServiceResponse get_game(const std::string& id);
  /// POST /api/games/{id}/move  {"action":move}
  ServiceResponse post_move(const std::string& id, const Json& body);
  /// GET /api/analyze?piles=..&pass=0|1
  ServiceResponse analyze(const std::optional<std::string>& piles,
                          const std::optional<std::string>& pass) const;

  /// Drops sessions idle for longer than the TTL; returns how many.
  std::size_t purge_expired();
  std::size_t session_count() const;

  /// `{"sessions":[...]}`; idle times are not persisted.
  Json snapshot() const;
  /// Replays every stored history from its initial position and rejects the
  /// snapshot (ParseError) if any replay disagrees with the stored state.
  void restore(const Json& snapshot);
  void save_snapshot(const std::string& path) const;
  /// Missing file is not an error; returns whether anything was loaded.
  bool load_snapshot(const std::string& path);

  const ServiceConfig& config() const noexcept { return config_; }

 private:
  struct Entry {
    std::mutex mutex;
    GameSession session;
    std::chrono::steady_clock::time_point last_access;
  };

  std::shared_ptr<Entry> find(const std::string& id);
  void engine_reply(GameSession& s);
  void play(GameSession& s, Player mover, const Move& m);
  std::string new_id();

  ServiceConfig config_;
  Clock clock_;
  mutable std::mutex store_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  // Closed-form and stateless, so shared by all sessions. A pass-free game
  // simply never has pass_available set.
  std::unique_ptr<Engine> engine_;
  std::mutex id_mutex_;
  std::mt19937_64 id_rng_;
};

/// Routes GameService onto an httplib::Server.
class HttpServer {
 public:
  explicit HttpServer(GameService& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Blocks until stop(). Returns false if the address could not be bound.
  bool listen(const std::string& host, int port);
  /// Binds to an ephemeral port and returns it (or -1), then serve with
  /// listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

 private:
  GameService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace maxnim
