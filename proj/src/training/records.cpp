#include "ens/training/records.hpp"

#include "ens/core/error.hpp"

namespace ens::training {

using nlohmann::json;

std::string render_prompt(const std::vector<Turn>& context) {
  std::string out;
  for (const auto& t : context) {
    if (!out.empty()) out.push_back('\n');
    out += t.speaker == Speaker::kUser ? "User: " : "Agent: ";
    out += t.utterance;
  }
  return out;
}

namespace {

// Context turns carry utterances and user emotions only.
Turn strip(const Turn& t) {
  Turn out;
  out.speaker = t.speaker;
  out.utterance = t.utterance;
  if (t.speaker == Speaker::kUser) out.emotion = t.emotion;
  return out;
}

std::vector<Turn> prefix(const Dialogue& d, std::size_t end) {
  std::vector<Turn> ctx;
  ctx.reserve(end);
  for (std::size_t i = 0; i < end; ++i) ctx.push_back(strip(d.turns[i]));
  return ctx;
}

}  // namespace

std::vector<LabeledRecord> labeled_records(const std::vector<Dialogue>& dialogues) {
  std::vector<LabeledRecord> out;
  for (const auto& d : dialogues) {
    for (std::size_t i = 0; i < d.turns.size(); ++i) {
      const Turn& t = d.turns[i];
      if (t.speaker != Speaker::kAgent || !t.rationale || i == 0) continue;
      auto r = to_rationale(*t.rationale);
      if (!r) {
        throw Error(r.error().code, d.id + " turn " + std::to_string(i) + ": " + r.error().describe());
      }
      out.push_back(LabeledRecord{d.id + "#" + std::to_string(i), prefix(d, i), r.value(),
                                  t.utterance, "labeled"});
    }
  }
  return out;
}

std::vector<UnlabeledRecord> unlabeled_records(const std::vector<Dialogue>& dialogues) {
  std::vector<UnlabeledRecord> out;
  for (const auto& d : dialogues) {
    for (std::size_t i = 1; i < d.turns.size(); ++i) {
      if (d.turns[i].speaker != Speaker::kAgent) continue;
      out.push_back(UnlabeledRecord{d.id + "#" + std::to_string(i), prefix(d, i),
                                    d.turns[i].utterance});
    }
  }
  return out;
}

TaggedTarget target_of(const LabeledRecord& record, AblationMask mask) {
  return render_tagged_target(apply_mask(record.rationale, mask), record.response, mask);
}

std::vector<TrainingExample> training_examples(const std::vector<LabeledRecord>& records,
                                               AblationMask mask) {
  std::vector<TrainingExample> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back(TrainingExample{render_prompt(r.context), target_of(r, mask).text});
  }
  return out;
}

json to_json(const LabeledRecord& r) {
  json j;
  j["id"] = r.id;
  j["context"] = json::array();
  for (const auto& t : r.context) j["context"].push_back(ens::to_json(t));
  j["rationale"] = ens::to_json(to_fields(r.rationale));
  j["response"] = r.response;
  j["source"] = r.source;
  return j;
}

LabeledRecord labeled_record_from_json(const json& j) {
  LabeledRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    for (const auto& t : j.at("context")) r.context.push_back(turn_from_json(t));
    r.rationale = to_rationale(rationale_fields_from_json(j.at("rationale"))).value();
    r.response = j.at("response").get<std::string>();
    r.source = j.value("source", "labeled");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("bad labeled record: ") + e.what());
  }
  return r;
}

json to_json(const UnlabeledRecord& r) {
  json j;
  j["id"] = r.id;
  j["context"] = json::array();
  for (const auto& t : r.context) j["context"].push_back(ens::to_json(t));
  j["response"] = r.response;
  return j;
}

}  // namespace ens::training
