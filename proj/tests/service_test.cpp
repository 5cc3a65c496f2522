#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <thread>

#include "httplib.h"
#include "maxnim/closed_form.hpp"
#include "maxnim/service.hpp"

using namespace maxnim;
using namespace std::chrono_literals;

namespace {

Json remove(std::size_t pile, Stones count) { return Json{{"type", "remove"}, {"pile", pile}, {"count", count}}; }
Json action(Json move) { return Json{{"action", std::move(move)}}; }

struct FakeClock {
  std::chrono::steady_clock::time_point now{};
  GameService::Clock fn() {
    return [this] { return now; };
  }
};

}  // namespace

TEST_CASE("move wire format") {
  CHECK(move_to_json(Remove{2, 3}) == remove(2, 3));
  CHECK(move_to_json(Pass{}) == Json{{"type", "pass"}});
  CHECK(move_from_json(remove(1, 4)) == Move{Remove{1, 4}});
  CHECK(move_from_json(Json{{"type", "pass"}}) == Move{Pass{}});
  CHECK_THROWS_AS(move_from_json(Json{{"type", "jump"}}), ParseError);
  CHECK_THROWS_AS(move_from_json(Json{{"type", "remove"}, {"pile", 0}}), ParseError);
  CHECK_THROWS_AS(move_from_json(Json{{"type", "remove"}, {"pile", -1}, {"count", 1}}), ParseError);
  CHECK_THROWS_AS(move_from_json(Json::array()), ParseError);
}

TEST_CASE("analyze endpoint") {
  GameService svc;
  auto r = svc.analyze("1,1,1", "1");
  REQUIRE(r.status == 200);
  CHECK(r.body["grundy"] == 0);
  CHECK(r.body["outcome"] == "P");
  CHECK(r.body["best"].is_null());
  CHECK(r.body["pass"] == 1);

  auto two = svc.analyze("2", "true");
  CHECK(two.body["grundy"] == 1);
  CHECK(two.body["best"] == Json{{"type", "pass"}});
  CHECK(two.body["evaluator_used"] == "closed_form");

  auto no_pass = svc.analyze("3,5", std::nullopt);
  CHECK(no_pass.body["grundy"] == 1);
  CHECK(no_pass.body["pass"] == 0);

  CHECK(svc.analyze(std::nullopt, "1").status == 400);
  CHECK(svc.analyze("a,b", "1").status == 400);
  CHECK(svc.analyze("3", "maybe").status == 400);
  CHECK(svc.analyze("4294967296", "0").status == 400);
}

TEST_CASE("create game validation") {
  GameService svc;
  CHECK(svc.create_game(Json::object()).status == 400);
  CHECK(svc.create_game(Json::array()).status == 400);
  CHECK(svc.create_game(Json{{"piles", Json::array({-1})}}).status == 400);
  CHECK(svc.create_game(Json{{"piles", "3,x"}}).status == 400);
  CHECK(svc.create_game(Json{{"piles", Json::array()}}).status == 400);
  CHECK(svc.create_game(Json{{"piles", Json::array({1})}, {"pass", "yes"}}).status == 400);
  CHECK(svc.create_game(Json{{"piles", std::vector<Stones>(65, 1)}}).status == 400);
  CHECK(svc.session_count() == 0);

  auto ok = svc.create_game(Json{{"piles", "3,5"}, {"pass", 1}});
  REQUIRE(ok.status == 201);
  CHECK(ok.body["pass_variant"] == true);
  CHECK(ok.body["position"]["piles"] == Json::array({3, 5}));
  CHECK(ok.body["position"]["pass_available"] == true);
  CHECK(ok.body["to_move"] == "human");
  CHECK(ok.body["status"] == "ongoing");
  CHECK(ok.body["id"].get<std::string>().size() == 32);
  CHECK(svc.session_count() == 1);
}

TEST_CASE("terminal start is finished immediately") {
  GameService svc;
  auto r = svc.create_game(Json{{"piles", {0, 0}}, {"pass", true}});
  REQUIRE(r.status == 201);
  CHECK(r.body["status"] == "finished");
  CHECK(r.body["winner"] == "engine");
  CHECK(r.body["to_move"].is_null());
}

TEST_CASE("engine moving first from [2] with pass plays the pass") {
  GameService svc;
  auto r = svc.create_game(Json{{"piles", {2}}, {"pass", true}, {"human_first", false}});
  REQUIRE(r.status == 201);
  REQUIRE(r.body["history"].size() == 1);
  CHECK(r.body["history"][0]["mover"] == "engine");
  CHECK(r.body["history"][0]["move"] == Json{{"type", "pass"}});
  CHECK(r.body["position"]["pass_available"] == false);
  CHECK(r.body["to_move"] == "human");

  const std::string id = r.body["id"];
  auto m = svc.post_move(id, action(remove(0, 1)));
  REQUIRE(m.status == 200);
  CHECK(m.body["status"] == "finished");
  CHECK(m.body["winner"] == "engine");
  CHECK(m.body["history"].size() == 3);
  CHECK(svc.post_move(id, action(remove(0, 1))).status == 409);
}

TEST_CASE("human loses [1,1,1] with pass against the engine") {
  GameService svc;
  auto r = svc.create_game(Json{{"piles", {1, 1, 1}}, {"pass", true}});
  const std::string id = r.body["id"];
  int moves = 0;
  for (;;) {
    auto g = svc.get_game(id);
    REQUIRE(g.status == 200);
    if (g.body["status"] == "finished") break;
    // Human plays the first legal move, found by sending an illegal one.
    auto bad = svc.post_move(id, action(remove(0, 99)));
    REQUIRE(bad.status == 409);
    REQUIRE_FALSE(bad.body["legal_moves"].empty());
    auto next = svc.post_move(id, action(bad.body["legal_moves"][0]));
    REQUIRE(next.status == 200);
    if (next.body["status"] == "ongoing") {
      // After each engine reply the human faces a P-position.
      std::vector<Stones> piles = next.body["position"]["piles"];
      CHECK(half_grundy_pass_multi(piles, next.body["position"]["pass_available"].get<bool>()).is_zero());
    }
    ++moves;
    REQUIRE(moves < 10);
  }
  CHECK(svc.get_game(id).body["winner"] == "engine");
}

TEST_CASE("move errors") {
  GameService svc;
  CHECK(svc.post_move("nope", action(remove(0, 1))).status == 404);
  CHECK(svc.get_game("nope").status == 404);

  auto r = svc.create_game(Json{{"piles", {5, 4}}, {"pass", false}});
  const std::string id = r.body["id"];
  CHECK(svc.post_move(id, Json{{"action", "take"}}).status == 400);
  CHECK(svc.post_move(id, Json::object()).status == 400);

  auto illegal = svc.post_move(id, action(remove(0, 4)));
  REQUIRE(illegal.status == 409);
  const Json expected = Json::array({remove(0, 1), remove(0, 2), remove(0, 3), remove(1, 1), remove(1, 2)});
  CHECK(illegal.body["legal_moves"] == expected);
  CHECK_FALSE(illegal.body.contains("legal_moves_truncated"));
  // Pass is illegal in the pass-free game.
  CHECK(svc.post_move(id, action(Json{{"type", "pass"}})).status == 409);

  // A bare move body is accepted too.
  CHECK(svc.post_move(id, remove(1, 1)).status == 200);
}

TEST_CASE("legal move list is truncated for huge piles") {
  GameService svc;
  auto r = svc.create_game(Json{{"piles", {100000}}});
  auto illegal = svc.post_move(r.body["id"], action(remove(0, 60000)));
  REQUIRE(illegal.status == 409);
  CHECK(illegal.body["legal_moves"].size() == 10000);
  CHECK(illegal.body["legal_moves_truncated"] == true);
}

TEST_CASE("sessions expire after the ttl") {
  FakeClock clock;
  ServiceConfig cfg;
  cfg.ttl = 60s;
  GameService svc(cfg, clock.fn());
  const std::string a = svc.create_game(Json{{"piles", {3}}}).body["id"];
  const std::string b = svc.create_game(Json{{"piles", {4}}}).body["id"];
  clock.now += 50s;
  CHECK(svc.get_game(a).status == 200);  // refreshes a
  clock.now += 50s;
  CHECK(svc.purge_expired() == 1);
  CHECK(svc.get_game(b).status == 404);
  CHECK(svc.get_game(a).status == 200);
  clock.now += 61s;
  CHECK(svc.get_game(a).status == 404);
  CHECK(svc.session_count() == 0);
}

TEST_CASE("snapshot round trip") {
  GameService svc;
  const std::string a = svc.create_game(Json{{"piles", {3, 5}}, {"pass", true}}).body["id"];
  svc.post_move(a, action(remove(1, 2)));
  const std::string b = svc.create_game(Json{{"piles", {2}}, {"pass", true}, {"human_first", false}}).body["id"];
  svc.create_game(Json{{"piles", {0}}});

  const char* path = "service_test_snapshot.json";
  svc.save_snapshot(path);
  GameService other;
  CHECK(other.load_snapshot(path));
  CHECK(other.session_count() == 3);
  CHECK(other.get_game(a).body == svc.get_game(a).body);
  CHECK(other.get_game(b).body == svc.get_game(b).body);
  CHECK(other.snapshot() == svc.snapshot());
  std::remove(path);
  CHECK_FALSE(other.load_snapshot(path));

  // A tampered position does not survive replay.
  auto snap = svc.snapshot();
  for (auto& s : snap["sessions"]) {
    if (s["id"] == a) s["position"]["piles"][0] = 1;
  }
  GameService third;
  CHECK_THROWS_AS(third.restore(snap), ParseError);
  CHECK(third.session_count() == 0);

  auto bad_move = svc.snapshot();
  for (auto& s : bad_move["sessions"]) {
    if (s["id"] == a) s["history"][0]["move"]["count"] = 9;
  }
  CHECK_THROWS_AS(third.restore(bad_move), ParseError);
  CHECK_THROWS_AS(third.restore(Json{{"sessions", 3}}), ParseError);
}

TEST_CASE("http server routes") {
  GameService svc;
  HttpServer server(svc);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto created = client.Post("/api/games", R"({"piles":[3,5],"pass":true})", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  CHECK(created->get_header_value("Access-Control-Allow-Origin") == "*");
  CHECK(created->get_header_value("Content-Type") == "application/json");
  const auto game = Json::parse(created->body);
  const std::string id = game["id"];

  auto got = client.Get("/api/games/" + id);
  REQUIRE(got);
  CHECK(got->status == 200);
  CHECK(Json::parse(got->body) == game);

  auto moved = client.Post("/api/games/" + id + "/move", R"({"action":{"type":"remove","pile":0,"count":1}})",
                           "application/json");
  REQUIRE(moved);
  CHECK(moved->status == 200);
  CHECK(Json::parse(moved->body)["history"].size() == 2);

  auto not_json = client.Post("/api/games", "{piles", "application/json");
  REQUIRE(not_json);
  CHECK(not_json->status == 400);
  CHECK(Json::parse(not_json->body).contains("error"));

  auto missing = client.Get("/api/games/unknown");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  auto analysis = client.Get("/api/analyze?piles=1,1,1&pass=1");
  REQUIRE(analysis);
  CHECK(analysis->status == 200);
  CHECK(Json::parse(analysis->body)["outcome"] == "P");

  auto preflight = client.Options("/api/games");
  REQUIRE(preflight);
  CHECK(preflight->status == 204);
  CHECK(preflight->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);

  server.stop();
  worker.join();
}
