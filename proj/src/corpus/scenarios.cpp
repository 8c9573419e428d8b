#include "ens/corpus/scenarios.hpp"

#include <random>
#include <sstream>

#include "ens/core/error.hpp"
#include "ens/core/jsonl.hpp"
#include "ens/core/random.hpp"
#include "ens/core/tagged.hpp"
#include "ens/core/text.hpp"

namespace ens::corpus {

using nlohmann::json;

bool is_known_domain(const std::string& tag) {
  return tag == "job_interview" || tag == "resource_allocation" || tag == "other";
}

std::string scenario_key(const std::string& t) { return text::normalize_for_dedup(t); }

bool is_adequate_scenario(const std::string& t) {
  const auto trimmed = text::trim(t);
  if (text::word_count(trimmed) < 20) return false;
  const char last = trimmed.back();
  return last == '.' || last == '!' || last == '?';
}

std::vector<Scenario> dedup_scenarios(const std::vector<Scenario>& scenarios) {
  std::set<std::string> seen;
  std::vector<Scenario> out;
  for (const auto& s : scenarios) {
    if (seen.insert(scenario_key(s.text)).second) out.push_back(s);
  }
  return out;
}

std::vector<Scenario> filter_scenarios(const std::vector<Scenario>& scenarios,
                                       const std::set<std::string>& reject_ids) {
  std::vector<Scenario> out;
  for (const auto& s : scenarios) {
    if (reject_ids.count(s.id) == 0 && is_adequate_scenario(s.text)) out.push_back(s);
  }
  return out;
}

std::string render_transcript(const Dialogue& d) {
  std::string out;
  for (const auto& t : d.turns) {
    if (t.speaker == Speaker::kUser) {
      out += "User: " + t.utterance + "\n";
      continue;
    }
    if (t.rationale) {
      if (auto r = to_rationale(*t.rationale)) {
        out += render_rationale_body(r.value(), r.value().present(), "\n") + "\n";
        continue;
      }
    }
    out += "Agent: " + t.utterance + "\n";
  }
  return out;
}

namespace {

std::string completion_text(ChatClient& client, const std::string& prompt, std::uint64_t seed) {
  ChatRequest req;
  req.prompt = prompt;
  req.seed = seed;
  return std::string(text::trim(client.complete(req)));
}

// Strips a leading "Scenario:" label some models add.
std::string clean_scenario(std::string s) {
  const auto lower = text::to_lower(s);
  if (text::starts_with(lower, "scenario:")) s = std::string(text::trim(s.substr(9)));
  return s;
}

}  // namespace

std::vector<Scenario> generate_scenarios(const std::vector<Dialogue>& seeds,
                                         const PromptTemplate& tmpl, ChatClient& client,
                                         std::size_t n, std::uint64_t seed,
                                         GenerationStats* stats) {
  if (n < 1) throw Error(ErrorCode::kConfig, "generate_scenarios needs n >= 1");
  GenerationStats local;
  std::vector<std::size_t> order(seeds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 g(text::derive_seed(seed, 0x5ce0ULL));
  rng::shuffle(order, g);
  if (order.size() > n) order.resize(n);

  std::vector<Scenario> out;
  std::set<std::string> seen;
  for (auto i : order) {
    const auto& d = seeds[i];
    const auto prompt = tmpl.instantiate(
        {{"Few-shot exemplars", ""}, {"Seed Negotiation Dialogue", render_transcript(d)}});
    ++local.requests;
    std::string t;
    try {
      t = clean_scenario(completion_text(client, prompt, text::derive_seed(seed, text::fnv1a(d.id))));
    } catch (const Error& e) {
      throw Error(e.code(), "scenario request for dialogue " + d.id + ": " + e.what());
    }
    if (t.empty()) {
      ++local.empty;
      continue;
    }
    if (!seen.insert(scenario_key(t)).second) {
      ++local.duplicates;
      continue;
    }
    if (!is_adequate_scenario(t)) {
      ++local.inadequate;
      continue;
    }
    out.push_back({"scn-" + d.id, t, d.domain_tag.empty() ? "other" : d.domain_tag, "seeded"});
  }
  if (stats) *stats = local;
  return out;
}

std::vector<Scenario> expand_scenarios(const std::vector<ScenarioExemplar>& exemplars,
                                       const std::vector<Scenario>& existing,
                                       const PromptTemplate& tmpl, ChatClient& client,
                                       std::size_t n, std::uint64_t seed,
                                       GenerationStats* stats) {
  if (exemplars.size() < 3) {
    throw Error(ErrorCode::kConfig, "scenario expansion needs at least 3 exemplars");
  }
  GenerationStats local;
  std::set<std::string> seen;
  for (const auto& s : existing) seen.insert(scenario_key(s.text));
  for (const auto& e : exemplars) seen.insert(scenario_key(e.scenario.text));

  std::vector<Scenario> out;
  for (std::size_t r = 0; r < n; ++r) {
    std::mt19937_64 g(text::derive_seed(seed, 0xe8a0ULL, r));
    std::vector<std::size_t> pick(exemplars.size());
    for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
    rng::shuffle(pick, g);
    pick.resize(3);

    std::string shots;
    for (auto i : pick) {
      shots += "Scenario: " + exemplars[i].scenario.text + "\nDialogue:\n" +
               render_transcript(exemplars[i].dialogue) + "\n";
    }
    const std::string domain = exemplars[pick[0]].scenario.domain_tag;
    std::map<std::string, std::string> values{{"Few-shot exemplars", shots}};
    values["Domain"] = domain == "job_interview" ? "job interview"
                       : domain == "resource_allocation" ? "resource allocation"
                                                         : domain;
    ++local.requests;
    std::string t;
    try {
      t = clean_scenario(completion_text(client, tmpl.instantiate(values), text::derive_seed(seed, r)));
    } catch (const Error& e) {
      throw Error(e.code(), "expansion request " + std::to_string(r) + ": " + e.what());
    }
    if (t.empty()) {
      ++local.empty;
      continue;
    }
    if (!seen.insert(scenario_key(t)).second) {
      ++local.duplicates;
      continue;
    }
    if (!is_adequate_scenario(t)) {
      ++local.inadequate;
      continue;
    }
    out.push_back({"exp-" + std::to_string(text::derive_seed(seed, r) % 1000000007ULL) + "-" +
                       std::to_string(r),
                   t, domain, "expanded"});
  }
  if (stats) *stats = local;
  return out;
}

json to_json(const Scenario& s) {
  return {{"id", s.id}, {"text", s.text}, {"domain_tag", s.domain_tag}, {"provenance", s.provenance}};
}

Scenario scenario_from_json(const json& j) {
  try {
    Scenario s{j.at("id").get<std::string>(), j.at("text").get<std::string>(),
               j.value("domain_tag", "other"), j.value("provenance", "seeded")};
    if (!is_known_domain(s.domain_tag)) {
      throw Error(ErrorCode::kSchema, "unknown domain tag " + s.domain_tag);
    }
    if (s.provenance != "seeded" && s.provenance != "expanded") {
      throw Error(ErrorCode::kSchema, "unknown provenance " + s.provenance);
    }
    if (text::trim(s.text).empty()) throw Error(ErrorCode::kSchema, "scenario " + s.id + " has no text");
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("bad scenario: ") + e.what());
  }
}

std::vector<Scenario> load_scenarios(const std::string& path) {
  std::vector<Scenario> out;
  for (const auto& j : io::read_jsonl(path)) out.push_back(scenario_from_json(j));
  return out;
}

void save_scenarios(const std::string& path, const std::vector<Scenario>& scenarios) {
  std::vector<json> docs;
  for (const auto& s : scenarios) docs.push_back(to_json(s));
  io::write_jsonl(path, docs);
}

std::set<std::string> load_reject_list(const std::string& path) {
  std::set<std::string> ids;
  std::istringstream in(io::read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    const auto id = text::trim(line);
    if (!id.empty() && id.front() != '#') ids.emplace(id);
  }
  return ids;
}

}  // namespace ens::corpus
