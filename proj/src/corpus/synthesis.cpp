#include "ens/corpus/synthesis.hpp"

#include <cctype>
#include <random>
#include <sstream>
#include <thread>

#include "ens/core/random.hpp"
#include "ens/core/tagged.hpp"
#include "ens/core/text.hpp"

namespace ens::corpus {

namespace {

ParseFailure failure(ErrorCode code, std::optional<Component> c, std::string message) {
  return ParseFailure{code, c, std::move(message)};
}

bool is_rationale_line(std::string_view line) {
  for (auto c : all_components()) {
    if (c == Component::kResponse) continue;
    const auto li = lead_in(c);
    if (text::starts_with(line, li) &&
        (line.size() == li.size() || std::isspace(static_cast<unsigned char>(line[li.size()])))) {
      return true;
    }
  }
  return false;
}

}  // namespace

Result<std::vector<Turn>> parse_transcript(std::string_view transcript, AblationMask mask) {
  std::vector<Turn> turns;
  std::vector<std::string> pending;  // rationale lines of the agent turn in progress
  bool in_user = false;
  std::istringstream in{std::string(transcript)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto line = std::string(text::trim(raw));
    if (line.empty() || text::starts_with(line, "---")) continue;
    if (text::starts_with(line, "User:")) {
      if (!pending.empty()) {
        return failure(ErrorCode::kParse, Component::kResponse,
                       "line " + std::to_string(lineno) + ": rationale without an Agent: line");
      }
      if (!turns.empty() && turns.back().speaker == Speaker::kUser) {
        return failure(ErrorCode::kTurnOrder, std::nullopt,
                       "line " + std::to_string(lineno) + ": two user turns in a row");
      }
      Turn t;
      t.speaker = Speaker::kUser;
      t.utterance = std::string(text::trim(std::string_view(line).substr(5)));
      turns.push_back(std::move(t));
      in_user = true;
      continue;
    }
    if (text::starts_with(line, "Agent:")) {
      if (turns.empty() || turns.back().speaker != Speaker::kUser) {
        return failure(ErrorCode::kTurnOrder, std::nullopt,
                       "line " + std::to_string(lineno) + ": agent turn without a preceding user turn");
      }
      pending.push_back(line);
      auto parsed = parse_rationale_body(text::join(pending, " "), mask);
      pending.clear();
      in_user = false;
      if (!parsed) {
        auto f = parsed.error();
        f.message = "agent turn " + std::to_string(turns.size()) + ": " + f.message;
        f.code = ErrorCode::kParse;
        return f;
      }
      const auto& r = parsed.value();
      if (r.emotion) turns.back().emotion = std::string(name(*r.emotion));
      Turn t;
      t.speaker = Speaker::kAgent;
      t.utterance = r.response;
      t.rationale = to_fields(r);
      turns.push_back(std::move(t));
      continue;
    }
    if (is_rationale_line(line) || !pending.empty()) {
      if (turns.empty() || turns.back().speaker != Speaker::kUser) {
        return failure(ErrorCode::kParse, std::nullopt,
                       "line " + std::to_string(lineno) + ": rationale outside an agent turn");
      }
      pending.push_back(line);
      in_user = false;
      continue;
    }
    if (in_user) {
      turns.back().utterance += " " + line;  // wrapped user utterance
      continue;
    }
    return failure(ErrorCode::kParse, std::nullopt,
                   "line " + std::to_string(lineno) + ": unrecognized line \"" + line + "\"");
  }
  if (!pending.empty()) {
    return failure(ErrorCode::kParse, Component::kResponse, "transcript ends inside an agent turn");
  }
  if (turns.empty()) return failure(ErrorCode::kParse, std::nullopt, "transcript has no turns");
  return turns;
}

SynthesisResult synthesize_dialogue(const Scenario& scenario, const std::vector<Dialogue>& exemplars,
                                    const PromptTemplate& tmpl, ChatClient& client,
                                    const SynthesisDecoding& decoding, const std::string& dialogue_id,
                                    std::uint64_t seed) {
  std::string shots;
  for (const auto& e : exemplars) shots += "Scenario: " + e.scenario + "\n" + render_transcript(e) + "\n";
  auto values = component_definitions();
  values["Negotiation Scenario"] = scenario.text;
  values["list of emotions"] = emotion_list();
  values["list of strategies"] = strategy_list();
  values["Few-shot exemplars"] = shots;

  ChatRequest req;
  req.prompt = tmpl.instantiate(values);
  req.temperature = decoding.temperature;
  req.top_p = decoding.top_p;
  req.seed = seed;
  SynthesisResult out;
  out.raw = client.complete(req);
  out.decoding = decoding;

  auto turns = parse_transcript(out.raw);
  if (!turns) throw SynthesisError(ErrorCode::kParse, turns.error().describe(), out.raw);
  out.dialogue.id = dialogue_id;
  out.dialogue.scenario = scenario.text;
  out.dialogue.domain_tag = scenario.domain_tag;
  out.dialogue.turns = turns.value();
  const auto report = validate_dialogue(out.dialogue);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw SynthesisError(v.code,
                         (v.turn ? "turn " + std::to_string(*v.turn) + ": " : std::string()) + v.message,
                         out.raw);
  }
  return out;
}

CorpusSynthesis synthesize_corpus(const std::vector<Scenario>& scenarios,
                                  const std::vector<Dialogue>& exemplars,
                                  const PromptTemplate& tmpl, ChatClient& client,
                                  const SynthesisDecoding& decoding, std::uint64_t seed,
                                  std::size_t parallelism) {
  struct Slot {
    std::optional<Dialogue> dialogue;
    std::optional<SynthesisFailure> failure;
    std::exception_ptr error;
  };
  std::vector<Slot> slots(scenarios.size());
  auto work = [&](std::size_t i) {
    const auto& s = scenarios[i];
    std::mt19937_64 g(text::derive_seed(seed, 0x5e7ULL, i));
    std::vector<std::size_t> pick(exemplars.size());
    for (std::size_t k = 0; k < pick.size(); ++k) pick[k] = k;
    rng::shuffle(pick, g);
    if (pick.size() > 3) pick.resize(3);
    std::vector<Dialogue> shots;
    for (auto k : pick) shots.push_back(exemplars[k]);
    try {
      auto r = synthesize_dialogue(s, shots, tmpl, client, decoding, "dlg-" + s.id,
                                   text::derive_seed(seed, text::fnv1a(s.id)));
      slots[i].dialogue = std::move(r.dialogue);
    } catch (const SynthesisError& e) {
      slots[i].failure = SynthesisFailure{s.id, e.what(), e.raw()};
    } catch (...) {
      slots[i].error = std::current_exception();
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(parallelism, scenarios.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < scenarios.size(); i += threads) work(i);
    });
  }
  for (auto& th : pool) th.join();

  // Single-writer fold in scenario order.
  CorpusSynthesis out;
  for (auto& s : slots) {
    if (s.error) std::rethrow_exception(s.error);
    if (s.dialogue) out.dialogues.push_back(std::move(*s.dialogue));
    if (s.failure) out.failures.push_back(std::move(*s.failure));
  }
  return out;
}

}  // namespace ens::corpus
