#include <doctest.h>

#include <httplib.h>

#include <filesystem>
#include <thread>

#include "ens/core/jsonl.hpp"
#include "ens/service/server.hpp"
#include "ens/service/session_store.hpp"
#include "fixtures.hpp"

using namespace ens;
using namespace ens::service;
using nlohmann::json;

namespace {

std::shared_ptr<const model::GenerativeBackend> desk_policy() {
  const auto labeled = testing::sample_labeled(6);
  return testing::desk_factory(labeled, {})();
}

std::shared_ptr<const model::GenerativeBackend> broken_policy() {
  auto script = std::make_shared<model::ScriptTable>();
  script->set_fallback({"no tags here"});
  model::MockBackendConfig cfg;
  cfg.script = script;
  return std::make_shared<model::MockBackend>(cfg);
}

void fill_store(SessionStore& store) {
  store.add_policy("desk", desk_policy());
  store.add_policy("broken", broken_policy());
  store.add_scenario({"scn-1", testing::sample_corpus()[0].scenario, "job_interview", "seeded"});
}

RatingRecord rating(const std::string& session, const std::string& rater, int ea) {
  RatingRecord r{session, rater, {}};
  for (const auto& d : rating_dimensions()) r.scores[d] = 3;
  r.scores["EA"] = ea;
  return r;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvariant;
}

// Runs a server on an ephemeral port for the lifetime of the object.
class LiveServer {
 public:
  LiveServer(SessionStore& store, std::optional<std::string> token) : server_(store, std::move(token)) {
    port_ = server_.bind_any_port();
    thread_ = std::thread([this] { server_.serve(); });
    for (int i = 0; i < 200 && !server_.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ~LiveServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(30);
    return c;
  }

 private:
  NegotiationServer server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("listen addresses parse and reject bad input") {
    CHECK(parse_listen_address("0.0.0.0:9000").host == "0.0.0.0");
    CHECK(parse_listen_address("0.0.0.0:9000").port == 9000);
    CHECK(parse_listen_address(":81").host == "127.0.0.1");
    CHECK(parse_listen_address("82").port == 82);
    CHECK_THROWS_AS(parse_listen_address("host:notaport"), Error);
    CHECK_THROWS_AS(parse_listen_address("host:70000"), Error);
    CHECK(http_status(ErrorCode::kUnknownSession) == 404);
    CHECK(http_status(ErrorCode::kAlreadyClosed) == 409);
    CHECK(http_status(ErrorCode::kScoreOutOfRange) == 422);
    CHECK(http_status(ErrorCode::kGenerationUnparseable) == 503);
    CHECK(http_status(ErrorCode::kSchema) == 400);
  }

  TEST_CASE("session lifecycle, rating rules and replay") {
    testing::TempDir dir("store");
    std::string sid;
    {
      SessionStore store(dir.str(), {});
      fill_store(store);
      CHECK(code_of([&] { store.create_session("nope", "desk"); }) == ErrorCode::kUnknownScenario);
      CHECK(code_of([&] { store.create_session("scn-1", "nope"); }) == ErrorCode::kUnknownPolicy);
      sid = store.create_session("scn-1", "desk");
      const auto served = store.post_user_turn(sid, "I hoped the salary would be higher.");
      CHECK_FALSE(served.agent.response.empty());
      CHECK(served.session.transcript.turns.size() == 2);
      CHECK(served.session.transcript.turns[0].speaker == Speaker::kUser);
      CHECK(served.session.transcript.turns[1].speaker == Speaker::kAgent);
      CHECK(code_of([&] { store.post_user_turn(sid, "   "); }) == ErrorCode::kSchema);
      CHECK(code_of([&] { store.submit_rating(rating(sid, "r1", 4)); }) == ErrorCode::kSessionOpen);
      const auto transcript = store.close_session(sid);
      CHECK(validate_dialogue(transcript).ok());
      CHECK(code_of([&] { store.close_session(sid); }) == ErrorCode::kAlreadyClosed);
      CHECK(code_of([&] { store.post_user_turn(sid, "more"); }) == ErrorCode::kAlreadyClosed);
      CHECK(code_of([&] { store.submit_rating(rating(sid, "r1", 6)); }) == ErrorCode::kScoreOutOfRange);
      auto missing = rating(sid, "r1", 4);
      missing.scores.erase("OF");
      CHECK(code_of([&] { store.submit_rating(missing); }) == ErrorCode::kMissingRating);
      store.submit_rating(rating(sid, "r1", 4));
      store.submit_rating(rating(sid, "r1", 5));
      CHECK(code_of([&] { store.agreement_report("EA"); }) == ErrorCode::kInsufficientRaters);
      CHECK(load_dialogues(store.transcripts_path()).size() == 1);
    }
    const auto log = io::read_file((dir.path() / "sessions" / (sid + ".jsonl")).string());
    CHECK(log.find("\"replaces\"") != std::string::npos);
    SessionStore replayed(dir.str(), {});
    const auto s = replayed.get(sid);
    CHECK(s.status == SessionStatus::kClosed);
    CHECK(s.transcript.turns.size() == 2);
    CHECK(s.ratings.at("r1").scores.at("EA") == 5);
    CHECK(code_of([&] { replayed.get("missing"); }) == ErrorCode::kUnknownSession);
  }

  TEST_CASE("agreement report matches a hand-computed kappa") {
    testing::TempDir dir("agree");
    SessionStore store(dir.str(), {});
    fill_store(store);
    const std::vector<std::vector<int>> table{{1, 1, 1}, {1, 1, 2}, {2, 2, 2}, {1, 2, 2}};
    for (const auto& row : table) {
      const auto sid = store.create_session("scn-1", "desk");
      store.post_user_turn(sid, "Can we talk about the budget?");
      store.close_session(sid);
      for (std::size_t r = 0; r < row.size(); ++r) store.submit_rating(rating(sid, "rater-" + std::to_string(r), row[r]));
    }
    const auto rep = store.agreement_report("EA");
    CHECK(rep.kappa == doctest::Approx(1.0 / 3.0));
    CHECK(rep.items == 4);
    CHECK(rep.raters_per_item == 3);
    // 6 ones and 6 twos
    CHECK(rep.mean == doctest::Approx(1.5));
    CHECK(rep.means.at("F") == doctest::Approx(3.0));
  }

  TEST_CASE("HTTP API maps errors to statuses") {
    testing::TempDir dir("http");
    SessionStore store(dir.str(), {});
    fill_store(store);
    LiveServer live(store, std::nullopt);
    auto c = live.client();

    auto r = c.Get("/sessions/none");
    REQUIRE(r);
    CHECK(r->status == 404);
    CHECK(json::parse(r->body)["error"] == "UnknownSession");
    r = c.Post("/sessions", "{not json", "application/json");
    CHECK(r->status == 400);
    r = c.Post("/sessions", json{{"scenario_id", "scn-1"}, {"policy_id", "desk"}}.dump(), "application/json");
    REQUIRE(r->status == 200);
    const auto sid = json::parse(r->body)["session_id"].get<std::string>();
    r = c.Post("/sessions/" + sid + "/turns", json{{"utterance", "Is remote work possible?"}}.dump(), "application/json");
    REQUIRE(r->status == 200);
    const auto turn = json::parse(r->body);
    for (const auto* key : {"EM", "ET", "IA", "PS", "MT", "SS", "SR", "RG"}) CHECK(turn["rationale"].contains(key));
    CHECK(turn["rationale"]["RG"] == turn["response"]);
    CHECK(turn["turn_index"] == 1);
    r = c.Post("/sessions/" + sid + "/ratings", json{{"rater_id", "a"}, {"scores", {{"F", 3}}}}.dump(), "application/json");
    CHECK(r->status == 409);
    r = c.Post("/sessions/" + sid + "/close", "", "application/json");
    CHECK(r->status == 200);
    r = c.Post("/sessions/" + sid + "/close", "", "application/json");
    CHECK(r->status == 409);
    r = c.Post("/sessions/" + sid + "/ratings", json{{"rater_id", "a"}, {"scores", {{"F", 2.5}}}}.dump(), "application/json");
    CHECK(r->status == 422);
    r = c.Get("/reports/agreement?dimension=EA");
    CHECK(r->status == 409);

    r = c.Post("/sessions", json{{"scenario_id", "scn-1"}, {"policy_id", "broken"}}.dump(), "application/json");
    const auto bad_sid = json::parse(r->body)["session_id"].get<std::string>();
    r = c.Post("/sessions/" + bad_sid + "/turns", json{{"utterance", "hello"}}.dump(), "application/json");
    CHECK(r->status == 503);
    CHECK(json::parse(r->body)["retryable"] == true);
    r = c.Options("/sessions");
    CHECK(r->status == 204);
  }

  TEST_CASE("bearer token is enforced") {
    testing::TempDir dir("auth");
    SessionStore store(dir.str(), {});
    fill_store(store);
    LiveServer live(store, std::string("s3cret"));
    auto c = live.client();
    auto r = c.Get("/sessions/none");
    CHECK(r->status == 401);
    c.set_bearer_token_auth("wrong");
    CHECK(c.Get("/sessions/none")->status == 401);
    c.set_bearer_token_auth("s3cret");
    CHECK(c.Get("/sessions/none")->status == 404);
  }
}
