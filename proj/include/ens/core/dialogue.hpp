#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ens/core/error.hpp"
#include "ens/core/rationale.hpp"
#include "ens/core/result.hpp"

namespace ens {

enum class Speaker { kUser, kAgent };

std::string_view to_string(Speaker s);
std::optional<Speaker> parse_speaker(std::string_view s);

// Persisted, string-level form of a rationale. Labels are kept as written so
// that off-catalog values survive ingestion and show up in validation.
struct RationaleFields {
  std::optional<std::string> emotion;
  std::optional<std::string> trigger;
  std::optional<std::string> assessment;
  std::optional<std::string> perspective_shift;
  std::optional<std::string> mindset_transformation;
  std::optional<std::string> strategy;
  std::optional<std::string> strategy_reason;
  std::string response;

  bool operator==(const RationaleFields&) const = default;
};

RationaleFields to_fields(const EnsCotRationale& rationale);
// Catalog-checked conversion; fails with CatalogError on unknown labels.
Result<EnsCotRationale> to_rationale(const RationaleFields& fields);

struct Turn {
  Speaker speaker = Speaker::kUser;
  std::string utterance;
  std::optional<std::string> emotion;       // user turns
  std::optional<RationaleFields> rationale;  // agent turns

  bool operator==(const Turn&) const = default;
};

struct Dialogue {
  std::string id;
  std::string scenario;
  std::string domain_tag;
  std::vector<Turn> turns;
  std::map<std::string, double> quality_ratings;

  bool operator==(const Dialogue&) const = default;
};

struct Violation {
  std::optional<std::size_t> turn;
  ErrorCode code = ErrorCode::kInvariant;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

// Lists every violated Turn / Dialogue / rationale invariant. `mask` names the
// components every agent rationale must carry.
ValidationReport validate_dialogue(const Dialogue& dialogue,
                                   AblationMask mask = AblationMask::full());

nlohmann::json to_json(const RationaleFields& fields);
nlohmann::json to_json(const Turn& turn);
nlohmann::json to_json(const Dialogue& dialogue);

// Throw Error(kSchema) on structurally wrong documents.
RationaleFields rationale_fields_from_json(const nlohmann::json& j);
Turn turn_from_json(const nlohmann::json& j);
Dialogue dialogue_from_json(const nlohmann::json& j);

std::vector<Dialogue> load_dialogues(const std::string& path);
void save_dialogues(const std::string& path, const std::vector<Dialogue>& dialogues);

}  // namespace ens
