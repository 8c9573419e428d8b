#include "ens/service/session_store.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>

#include "ens/core/error.hpp"
#include "ens/core/jsonl.hpp"
#include "ens/core/text.hpp"
#include "ens/eval/stats.hpp"

namespace ens::service {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& rating_dimensions() {
  static const std::vector<std::string> dims = {"F", "C", "E", "EA", "ENSC", "BE", "OF"};
  return dims;
}

json to_json(const RatingRecord& r) {
  return {{"session_id", r.session_id}, {"rater_id", r.rater_id}, {"scores", r.scores}};
}

json to_json(const Session& s) {
  json ratings = json::array();
  for (const auto& [rater, r] : s.ratings) ratings.push_back(to_json(r));
  return {{"session_id", s.id},
          {"scenario_id", s.scenario_id},
          {"scenario", s.scenario},
          {"policy_id", s.policy_id},
          {"status", s.status == SessionStatus::kOpen ? "open" : "closed"},
          {"created_at", s.created_at},
          {"transcript", ens::to_json(s.transcript)},
          {"ratings", ratings}};
}

namespace {

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void check_scores(const RatingRecord& r) {
  for (const auto& d : rating_dimensions()) {
    auto it = r.scores.find(d);
    if (it == r.scores.end()) {
      throw Error(ErrorCode::kMissingRating, "rating lacks dimension " + d);
    }
    if (it->second < 1 || it->second > 5) {
      throw Error(ErrorCode::kScoreOutOfRange, d + " score " + std::to_string(it->second) + " outside 1..5");
    }
  }
  for (const auto& [k, v] : r.scores) {
    const auto& dims = rating_dimensions();
    if (std::find(dims.begin(), dims.end(), k) == dims.end()) {
      throw Error(ErrorCode::kSchema, "unknown rating dimension " + k);
    }
  }
}

}  // namespace

SessionStore::SessionStore(std::string dir, training::AgentOptions agent_options)
    : dir_(std::move(dir)), agent_options_(std::move(agent_options)) {
  fs::create_directories(fs::path(dir_) / "sessions");
  replay();
}

std::string SessionStore::transcripts_path() const {
  return (fs::path(dir_) / "transcripts.jsonl").string();
}

void SessionStore::add_policy(const std::string& id, std::shared_ptr<const model::GenerativeBackend> p) {
  std::lock_guard lock(mu_);
  policies_[id] = std::move(p);
}

void SessionStore::add_scenario(const corpus::Scenario& s) {
  std::lock_guard lock(mu_);
  scenarios_[s.id] = s;
}

void SessionStore::append_event(const std::string& id, const json& event) const {
  io::append_line((fs::path(dir_) / "sessions" / (id + ".jsonl")).string(), event.dump());
}

void SessionStore::replay() {
  std::vector<fs::path> logs;
  for (const auto& f : fs::directory_iterator(fs::path(dir_) / "sessions")) {
    if (f.path().extension() == ".jsonl") logs.push_back(f.path());
  }
  std::sort(logs.begin(), logs.end());
  for (const auto& path : logs) {
    auto e = std::make_shared<Entry>();
    Session& s = e->session;
    for (const auto& ev : io::read_jsonl(path.string())) {
      const auto type = ev.at("type").get<std::string>();
      if (type == "created") {
        s.id = ev.at("session_id").get<std::string>();
        s.scenario_id = ev.at("scenario_id").get<std::string>();
        s.scenario = ev.at("scenario").get<std::string>();
        s.policy_id = ev.at("policy_id").get<std::string>();
        s.created_at = ev.at("created_at").get<std::string>();
        s.transcript.id = s.id;
        s.transcript.scenario = s.scenario;
        s.transcript.domain_tag = ev.value("domain_tag", "other");
      } else if (type == "turn") {
        s.transcript.turns.push_back(turn_from_json(ev.at("user")));
        s.transcript.turns.push_back(turn_from_json(ev.at("agent")));
      } else if (type == "closed") {
        s.status = SessionStatus::kClosed;
      } else if (type == "rating") {
        RatingRecord r{s.id, ev.at("rater_id").get<std::string>(),
                       ev.at("scores").get<std::map<std::string, int>>()};
        s.ratings[r.rater_id] = r;
      }
    }
    if (s.id.empty()) continue;
    unsigned long long n = 0;
    if (std::sscanf(s.id.c_str(), "s%llu", &n) == 1) next_id_ = std::max<std::size_t>(next_id_, n + 1);
    sessions_[s.id] = e;
  }
}

std::shared_ptr<SessionStore::Entry> SessionStore::entry(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::kUnknownSession, "unknown session " + id);
  return it->second;
}

std::string SessionStore::create_session(const std::string& scenario_id, const std::string& policy_id) {
  std::lock_guard lock(mu_);
  if (policies_.count(policy_id) == 0) throw Error(ErrorCode::kUnknownPolicy, "unknown policy " + policy_id);
  auto sc = scenarios_.find(scenario_id);
  if (sc == scenarios_.end()) throw Error(ErrorCode::kUnknownScenario, "unknown scenario " + scenario_id);
  char id[32];
  std::snprintf(id, sizeof(id), "s%06zu", next_id_++);
  auto e = std::make_shared<Entry>();
  Session& s = e->session;
  s.id = id;
  s.scenario_id = scenario_id;
  s.scenario = sc->second.text;
  s.policy_id = policy_id;
  s.created_at = now_utc();
  s.transcript.id = s.id;
  s.transcript.scenario = s.scenario;
  s.transcript.domain_tag = sc->second.domain_tag;
  append_event(s.id, {{"type", "created"},
                      {"session_id", s.id},
                      {"scenario_id", s.scenario_id},
                      {"scenario", s.scenario},
                      {"domain_tag", s.transcript.domain_tag},
                      {"policy_id", s.policy_id},
                      {"created_at", s.created_at}});
  sessions_[s.id] = e;
  return s.id;
}

ServedTurn SessionStore::post_user_turn(const std::string& id, const std::string& utterance) {
  auto e = entry(id);
  std::lock_guard lock(e->mu);
  Session& s = e->session;
  if (s.status == SessionStatus::kClosed) throw Error(ErrorCode::kAlreadyClosed, "session " + id + " is closed");
  if (!s.transcript.turns.empty() && s.transcript.turns.back().speaker == Speaker::kUser) {
    throw Error(ErrorCode::kTurnOrder, "session " + id + " awaits an agent turn");
  }
  if (text::trim(utterance).empty()) throw Error(ErrorCode::kSchema, "utterance is empty");
  std::shared_ptr<const model::GenerativeBackend> policy;
  {
    std::lock_guard g(mu_);
    auto it = policies_.find(s.policy_id);
    if (it == policies_.end()) throw Error(ErrorCode::kUnknownPolicy, "unknown policy " + s.policy_id);
    policy = it->second;
  }

  Turn user;
  user.speaker = Speaker::kUser;
  user.utterance = std::string(text::trim(utterance));
  auto context = s.transcript.turns;
  context.push_back(user);
  auto opts = agent_options_;
  opts.decoding.seed = text::derive_seed(agent_options_.decoding.seed, text::fnv1a(id), context.size());
  auto agent = training::generate_agent_turn(*policy, context, opts);

  // The perceived emotion is the policy's reading of the user turn.
  if (agent.rationale.emotion) user.emotion = std::string(name(*agent.rationale.emotion));
  Turn reply;
  reply.speaker = Speaker::kAgent;
  reply.utterance = agent.response;
  auto r = agent.rationale;
  r.response = agent.response;
  reply.rationale = to_fields(r);

  append_event(id, {{"type", "turn"}, {"user", ens::to_json(user)}, {"agent", ens::to_json(reply)}});
  s.transcript.turns.push_back(std::move(user));
  s.transcript.turns.push_back(std::move(reply));
  return {std::move(agent), s};
}

Dialogue SessionStore::close_session(const std::string& id) {
  auto e = entry(id);
  std::lock_guard lock(e->mu);
  Session& s = e->session;
  if (s.status == SessionStatus::kClosed) throw Error(ErrorCode::kAlreadyClosed, "session " + id + " is already closed");
  append_event(id, {{"type", "closed"}});
  s.status = SessionStatus::kClosed;
  {
    std::lock_guard g(mu_);
    io::append_line(transcripts_path(), ens::to_json(s.transcript).dump());
  }
  return s.transcript;
}

void SessionStore::submit_rating(const RatingRecord& rating) {
  auto e = entry(rating.session_id);
  std::lock_guard lock(e->mu);
  Session& s = e->session;
  if (s.status != SessionStatus::kClosed) {
    throw Error(ErrorCode::kSessionOpen, "session " + s.id + " must be closed before rating");
  }
  if (text::trim(rating.rater_id).empty()) throw Error(ErrorCode::kSchema, "rater_id is empty");
  check_scores(rating);
  json ev = {{"type", "rating"}, {"rater_id", rating.rater_id}, {"scores", rating.scores}};
  if (auto prev = s.ratings.find(rating.rater_id); prev != s.ratings.end()) {
    ev["replaces"] = prev->second.scores;  // audit entry for the overwrite
  }
  append_event(s.id, ev);
  s.ratings[rating.rater_id] = rating;
}

Session SessionStore::get(const std::string& id) const {
  auto e = entry(id);
  std::lock_guard lock(e->mu);
  return e->session;
}

std::vector<std::string> SessionStore::session_ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> ids;
  for (const auto& [id, e] : sessions_) ids.push_back(id);
  return ids;
}

AgreementReport SessionStore::agreement_report(const std::string& dimension) const {
  const auto& dims = rating_dimensions();
  if (std::find(dims.begin(), dims.end(), dimension) == dims.end()) {
    throw Error(ErrorCode::kSchema, "unknown rating dimension " + dimension);
  }
  std::vector<std::vector<int>> rows;  // per session, scores in rater-id order
  std::map<std::string, double> sums;
  std::size_t n_ratings = 0;
  for (const auto& id : session_ids()) {
    const auto s = get(id);
    std::vector<int> row;
    for (const auto& [rater, r] : s.ratings) {
      row.push_back(r.scores.at(dimension));
      for (const auto& d : dims) sums[d] += r.scores.at(d);
      ++n_ratings;
    }
    if (row.size() >= 2) rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw Error(ErrorCode::kInsufficientRaters, "no session has ratings from two or more raters");
  }
  std::size_t common = rows.front().size();
  for (const auto& r : rows) common = std::min(common, r.size());
  for (auto& r : rows) r.resize(common);

  AgreementReport rep;
  rep.dimension = dimension;
  rep.kappa = eval::fleiss_kappa({dimension, rows});
  for (const auto& d : dims) rep.means[d] = sums[d] / static_cast<double>(n_ratings);
  rep.mean = rep.means[dimension];
  rep.items = rows.size();
  rep.raters_per_item = common;
  return rep;
}

}  // namespace ens::service
