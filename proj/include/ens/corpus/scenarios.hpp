#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ens/core/dialogue.hpp"
#include "ens/corpus/chat_client.hpp"
#include "ens/corpus/prompts.hpp"

namespace ens::corpus {

struct Scenario {
  std::string id;
  std::string text;
  std::string domain_tag = "other";  // job_interview | resource_allocation | other
  std::string provenance = "seeded";  // seeded | expanded

  bool operator==(const Scenario&) const = default;
};

bool is_known_domain(const std::string& tag);

// Lowercase, punctuation stripped, whitespace collapsed.
std::string scenario_key(const std::string& text);

// At least 20 words and ending in '.', '!' or '?'.
bool is_adequate_scenario(const std::string& text);

// Keeps the first scenario per normalized text. Idempotent.
std::vector<Scenario> dedup_scenarios(const std::vector<Scenario>& scenarios);

// Drops inadequate scenarios and ids listed in `reject_ids`.
std::vector<Scenario> filter_scenarios(const std::vector<Scenario>& scenarios,
                                       const std::set<std::string>& reject_ids);

struct GenerationStats {
  std::size_t requests = 0;
  std::size_t empty = 0;        // empty completions skipped
  std::size_t duplicates = 0;
  std::size_t inadequate = 0;
};

// "User: ..." / rationale lines / "Agent: ..." transcript of a dialogue.
std::string render_transcript(const Dialogue& dialogue);

// One client call per sampled seed dialogue (at most n).
std::vector<Scenario> generate_scenarios(const std::vector<Dialogue>& seeds,
                                         const PromptTemplate& tmpl, ChatClient& client,
                                         std::size_t n, std::uint64_t seed,
                                         GenerationStats* stats = nullptr);

struct ScenarioExemplar {
  Scenario scenario;
  Dialogue dialogue;
};

// n requests, each with 3 exemplars resampled from `exemplars`. New
// scenarios that duplicate `existing` (or each other) are dropped.
std::vector<Scenario> expand_scenarios(const std::vector<ScenarioExemplar>& exemplars,
                                       const std::vector<Scenario>& existing,
                                       const PromptTemplate& tmpl, ChatClient& client,
                                       std::size_t n, std::uint64_t seed,
                                       GenerationStats* stats = nullptr);

nlohmann::json to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);
std::vector<Scenario> load_scenarios(const std::string& path);
void save_scenarios(const std::string& path, const std::vector<Scenario>& scenarios);
std::set<std::string> load_reject_list(const std::string& path);

}  // namespace ens::corpus
