#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ens/core/dialogue.hpp"
#include "ens/core/rationale.hpp"
#include "ens/core/tagged.hpp"

namespace ens::training {

// (context, rationale, response) with the context ending in a user turn.
struct LabeledRecord {
  std::string id;
  std::vector<Turn> context;
  EnsCotRationale rationale;
  std::string response;
  std::string source = "labeled";  // or "pseudo"

  bool operator==(const LabeledRecord&) const = default;
};

// (context, ground-truth response) without a rationale.
struct UnlabeledRecord {
  std::string id;
  std::vector<Turn> context;
  std::string response;

  bool operator==(const UnlabeledRecord&) const = default;
};

struct TrainingExample {
  std::string prompt;
  std::string target;
};

// "User: ...\nAgent: ...\nUser: ..." transcript the policy conditions on.
std::string render_prompt(const std::vector<Turn>& context);

// One record per rationale-annotated agent turn. Throws Error on rationales
// that fail catalog conversion; validate the corpus first.
std::vector<LabeledRecord> labeled_records(const std::vector<Dialogue>& dialogues);
// One record per agent turn; rationales, if any, are ignored.
std::vector<UnlabeledRecord> unlabeled_records(const std::vector<Dialogue>& dialogues);

TaggedTarget target_of(const LabeledRecord& record, AblationMask mask);
std::vector<TrainingExample> training_examples(const std::vector<LabeledRecord>& records,
                                               AblationMask mask);

nlohmann::json to_json(const LabeledRecord& record);
LabeledRecord labeled_record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const UnlabeledRecord& record);

}  // namespace ens::training
