#include "ens/core/dialogue.hpp"

#include "ens/core/jsonl.hpp"
#include "ens/core/tagged.hpp"
#include "ens/core/text.hpp"

namespace ens {

using nlohmann::json;

std::string_view to_string(Speaker s) { return s == Speaker::kUser ? "user" : "agent"; }

std::optional<Speaker> parse_speaker(std::string_view s) {
  const auto key = text::normalize_label(s);
  if (key == "user") return Speaker::kUser;
  if (key == "agent") return Speaker::kAgent;
  return std::nullopt;
}

RationaleFields to_fields(const EnsCotRationale& r) {
  RationaleFields f;
  if (r.emotion) f.emotion = std::string(name(*r.emotion));
  f.trigger = r.trigger;
  f.assessment = r.assessment;
  f.perspective_shift = r.perspective_shift;
  f.mindset_transformation = r.mindset_transformation;
  if (r.strategy) f.strategy = std::string(name(*r.strategy));
  f.strategy_reason = r.strategy_reason;
  f.response = r.response;
  return f;
}

Result<EnsCotRationale> to_rationale(const RationaleFields& f) {
  EnsCotRationale r;
  if (f.emotion) {
    r.emotion = parse_emotion(*f.emotion);
    if (!r.emotion) {
      return ParseFailure{ErrorCode::kCatalog, Component::kEmotion,
                          "\"" + *f.emotion + "\" is not a catalog emotion"};
    }
  }
  if (f.strategy) {
    r.strategy = parse_strategy(*f.strategy);
    if (!r.strategy) {
      return ParseFailure{ErrorCode::kCatalog, Component::kStrategy,
                          "\"" + *f.strategy + "\" is not a catalog strategy"};
    }
  }
  r.trigger = f.trigger;
  r.assessment = f.assessment;
  r.perspective_shift = f.perspective_shift;
  r.mindset_transformation = f.mindset_transformation;
  r.strategy_reason = f.strategy_reason;
  r.response = f.response;
  return r;
}

ValidationReport validate_dialogue(const Dialogue& d, AblationMask mask) {
  ValidationReport report;
  auto add = [&](std::optional<std::size_t> turn, ErrorCode code, std::string msg) {
    report.violations.push_back(Violation{turn, code, std::move(msg)});
  };

  if (text::trim(d.id).empty()) add(std::nullopt, ErrorCode::kSchema, "dialogue id is empty");
  if (text::trim(d.scenario).empty()) {
    add(std::nullopt, ErrorCode::kInvariant, "scenario is empty");
  }
  for (const auto& [criterion, score] : d.quality_ratings) {
    if (!(score >= 1.0 && score <= 5.0)) {
      add(std::nullopt, ErrorCode::kInvariant,
          "quality rating " + criterion + " outside [1,5]");
    }
  }

  for (std::size_t i = 0; i < d.turns.size(); ++i) {
    const Turn& t = d.turns[i];
    const Speaker expected = i % 2 == 0 ? Speaker::kUser : Speaker::kAgent;
    if (t.speaker != expected) {
      add(i, ErrorCode::kTurnOrder,
          "expected a " + std::string(to_string(expected)) + " turn");
    }
    if (text::trim(t.utterance).empty()) add(i, ErrorCode::kInvariant, "utterance is empty");

    if (t.speaker == Speaker::kUser) {
      if (t.rationale) add(i, ErrorCode::kInvariant, "user turns never carry a rationale");
      if (t.emotion && !parse_emotion(*t.emotion)) {
        add(i, ErrorCode::kCatalog, "\"" + *t.emotion + "\" is not a catalog emotion");
      }
      continue;
    }

    if (t.emotion) add(i, ErrorCode::kInvariant, "agent turns carry no user emotion");
    if (!t.rationale) continue;
    auto converted = to_rationale(*t.rationale);
    if (!converted) {
      add(i, converted.error().code, converted.error().describe());
      continue;
    }
    const EnsCotRationale& r = converted.value();
    for (auto c : all_components()) {
      if (!mask.includes(c)) continue;
      if (!r.present().includes(c)) {
        add(i, ErrorCode::kMissingComponent,
            "component " + std::string(code(c)) + " is absent");
        continue;
      }
      std::optional<std::string> textual;
      switch (c) {
        case Component::kTrigger: textual = r.trigger; break;
        case Component::kAssessment: textual = r.assessment; break;
        case Component::kPerspectiveShift: textual = r.perspective_shift; break;
        case Component::kMindsetTransformation: textual = r.mindset_transformation; break;
        case Component::kStrategyReason: textual = r.strategy_reason; break;
        case Component::kResponse: textual = r.response; break;
        default: break;
      }
      if (textual) {
        if (auto problem = check_component_text(c, *textual)) {
          add(i, problem->code, problem->describe());
        }
      }
    }
    if (r.response != t.utterance) {
      add(i, ErrorCode::kInvariant, "rationale response differs from the agent utterance");
    }
  }
  return report;
}

namespace {

json opt(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

std::optional<std::string> opt_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorCode::kSchema, std::string("field ") + key + " must be a string");
  }
  return it->get<std::string>();
}

std::string req_string(const json& j, const char* key) {
  auto v = opt_string(j, key);
  if (!v) throw Error(ErrorCode::kSchema, std::string("missing field ") + key);
  return *v;
}

std::string canonical_emotion(const std::string& raw) {
  auto e = parse_emotion(raw);
  return e ? std::string(name(*e)) : raw;
}

std::string canonical_strategy(const std::string& raw) {
  auto s = parse_strategy(raw);
  return s ? std::string(name(*s)) : raw;
}

}  // namespace

json to_json(const RationaleFields& f) {
  json j;
  j["emotion"] = f.emotion ? json(canonical_emotion(*f.emotion)) : json(nullptr);
  j["trigger"] = opt(f.trigger);
  j["assessment"] = opt(f.assessment);
  j["perspective_shift"] = opt(f.perspective_shift);
  j["mindset_transformation"] = opt(f.mindset_transformation);
  j["strategy"] = f.strategy ? json(canonical_strategy(*f.strategy)) : json(nullptr);
  j["strategy_reason"] = opt(f.strategy_reason);
  j["response"] = f.response;
  return j;
}

json to_json(const Turn& t) {
  json j;
  j["speaker"] = std::string(to_string(t.speaker));
  j["utterance"] = t.utterance;
  j["emotion"] = t.emotion ? json(canonical_emotion(*t.emotion)) : json(nullptr);
  j["rationale"] = t.rationale ? to_json(*t.rationale) : json(nullptr);
  return j;
}

json to_json(const Dialogue& d) {
  json j;
  j["id"] = d.id;
  j["scenario"] = d.scenario;
  j["domain_tag"] = d.domain_tag;
  j["turns"] = json::array();
  for (const auto& t : d.turns) j["turns"].push_back(to_json(t));
  j["quality_ratings"] = json::object();
  for (const auto& [k, v] : d.quality_ratings) j["quality_ratings"][k] = v;
  return j;
}

RationaleFields rationale_fields_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "rationale must be an object");
  RationaleFields f;
  f.emotion = opt_string(j, "emotion");
  f.trigger = opt_string(j, "trigger");
  f.assessment = opt_string(j, "assessment");
  f.perspective_shift = opt_string(j, "perspective_shift");
  f.mindset_transformation = opt_string(j, "mindset_transformation");
  f.strategy = opt_string(j, "strategy");
  f.strategy_reason = opt_string(j, "strategy_reason");
  f.response = req_string(j, "response");
  return f;
}

Turn turn_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "turn must be an object");
  Turn t;
  const auto speaker = req_string(j, "speaker");
  auto s = parse_speaker(speaker);
  if (!s) throw Error(ErrorCode::kSchema, "unknown speaker \"" + speaker + "\"");
  t.speaker = *s;
  t.utterance = req_string(j, "utterance");
  t.emotion = opt_string(j, "emotion");
  if (auto it = j.find("rationale"); it != j.end() && !it->is_null()) {
    t.rationale = rationale_fields_from_json(*it);
  }
  return t;
}

Dialogue dialogue_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "dialogue must be an object");
  Dialogue d;
  d.id = req_string(j, "id");
  d.scenario = req_string(j, "scenario");
  d.domain_tag = opt_string(j, "domain_tag").value_or("");
  auto turns = j.find("turns");
  if (turns == j.end() || !turns->is_array()) {
    throw Error(ErrorCode::kSchema, "dialogue " + d.id + ": turns must be an array");
  }
  for (const auto& t : *turns) d.turns.push_back(turn_from_json(t));
  if (auto q = j.find("quality_ratings"); q != j.end() && !q->is_null()) {
    if (!q->is_object()) throw Error(ErrorCode::kSchema, "quality_ratings must be an object");
    for (const auto& [k, v] : q->items()) {
      if (!v.is_number()) throw Error(ErrorCode::kSchema, "quality rating " + k + " not numeric");
      d.quality_ratings[k] = v.get<double>();
    }
  }
  return d;
}

std::vector<Dialogue> load_dialogues(const std::string& path) {
  std::vector<Dialogue> out;
  std::size_t n = 0;
  for (const auto& doc : io::read_jsonl(path)) {
    ++n;
    try {
      out.push_back(dialogue_from_json(doc));
    } catch (const Error& e) {
      throw Error(e.code(), path + ": record " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void save_dialogues(const std::string& path, const std::vector<Dialogue>& dialogues) {
  std::vector<json> docs;
  docs.reserve(dialogues.size());
  for (const auto& d : dialogues) docs.push_back(to_json(d));
  io::write_jsonl(path, docs);
}

}  // namespace ens
