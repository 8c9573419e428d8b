#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ens/core/dialogue.hpp"
#include "ens/corpus/scenarios.hpp"
#include "ens/model/backend.hpp"
#include "ens/training/agent.hpp"

namespace ens::service {

// F, C, E, EA, ENSC, BE, OF.
const std::vector<std::string>& rating_dimensions();

struct RatingRecord {
  std::string session_id;
  std::string rater_id;
  std::map<std::string, int> scores;

  bool operator==(const RatingRecord&) const = default;
};

enum class SessionStatus { kOpen, kClosed };

struct Session {
  std::string id;
  std::string scenario_id;
  std::string scenario;
  std::string policy_id;
  Dialogue transcript;
  SessionStatus status = SessionStatus::kOpen;
  std::string created_at;
  std::map<std::string, RatingRecord> ratings;  // by rater id
};

nlohmann::json to_json(const Session& session);
nlohmann::json to_json(const RatingRecord& rating);

struct ServedTurn {
  training::AgentTurn agent;
  Session session;  // state after the turn
};

struct AgreementReport {
  std::string dimension;
  double kappa = 0.0;
  double mean = 0.0;                     // of `dimension`
  std::map<std::string, double> means;   // every dimension
  std::size_t items = 0;
  std::size_t raters_per_item = 0;
};

// Sessions with append-only JSONL event logs under `dir`/sessions; the state
// is rebuilt by replay on construction. Closed transcripts are also appended
// to `dir`/transcripts.jsonl in the corpus schema.
class SessionStore {
 public:
  SessionStore(std::string dir, training::AgentOptions agent_options);

  void add_policy(const std::string& policy_id, std::shared_ptr<const model::GenerativeBackend> policy);
  void add_scenario(const corpus::Scenario& scenario);

  std::string create_session(const std::string& scenario_id, const std::string& policy_id);
  ServedTurn post_user_turn(const std::string& session_id, const std::string& utterance);
  Dialogue close_session(const std::string& session_id);
  void submit_rating(const RatingRecord& rating);
  Session get(const std::string& session_id) const;
  std::vector<std::string> session_ids() const;
  AgreementReport agreement_report(const std::string& dimension) const;

  std::string transcripts_path() const;

 private:
  struct Entry {
    Session session;
    std::mutex mu;  // serializes requests within the session
  };

  std::shared_ptr<Entry> entry(const std::string& session_id) const;
  void append_event(const std::string& session_id, const nlohmann::json& event) const;
  void replay();

  std::string dir_;
  training::AgentOptions agent_options_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const model::GenerativeBackend>> policies_;
  std::map<std::string, corpus::Scenario> scenarios_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::size_t next_id_ = 1;
};

}  // namespace ens::service
