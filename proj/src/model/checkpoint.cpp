#include "ens/model/checkpoint.hpp"

#include <cstdio>

#include <json.hpp>

#include "ens/core/error.hpp"
#include "ens/core/jsonl.hpp"
#include "ens/core/text.hpp"

namespace ens::model {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kBase: return "base";
    case Stage::kSft: return "sft";
    case Stage::kDpo: return "dpo";
  }
  return "base";
}

std::optional<Stage> parse_stage(std::string_view s) {
  const auto key = text::normalize_label(s);
  if (key == "base") return Stage::kBase;
  if (key == "sft") return Stage::kSft;
  if (key == "dpo") return Stage::kDpo;
  return std::nullopt;
}

bool is_valid_transition(Stage from, Stage to) {
  return (from == Stage::kBase && to == Stage::kSft) || (from == Stage::kSft && to == Stage::kDpo);
}

std::string checkpoint_name(const Provenance& p) {
  return std::string(to_string(p.stage)) + "-" + std::to_string(p.iteration);
}

std::string payload_digest(const std::string& payload) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(text::fnv1a(payload)));
  return buf;
}

void save_checkpoint(const std::string& path, const PolicyCheckpoint& ck) {
  nlohmann::json header;
  header["base_model_id"] = ck.provenance.base_model_id;
  header["iteration"] = ck.provenance.iteration;
  header["stage"] = std::string(to_string(ck.provenance.stage));
  header["payload_bytes"] = ck.payload.size();
  io::write_file_atomic(path, header.dump() + "\n" + ck.payload);
}

PolicyCheckpoint load_checkpoint(const std::string& path) {
  const std::string raw = io::read_file(path);
  const auto nl = raw.find('\n');
  if (nl == std::string::npos) throw Error(ErrorCode::kSchema, path + ": missing checkpoint header");
  PolicyCheckpoint ck;
  try {
    const auto header = nlohmann::json::parse(raw.substr(0, nl));
    ck.provenance.base_model_id = header.at("base_model_id").get<std::string>();
    ck.provenance.iteration = header.at("iteration").get<int>();
    auto stage = parse_stage(header.at("stage").get<std::string>());
    if (!stage) throw Error(ErrorCode::kSchema, path + ": unknown stage");
    ck.provenance.stage = *stage;
    ck.payload = raw.substr(nl + 1);
    if (ck.payload.size() != header.at("payload_bytes").get<std::size_t>()) {
      throw Error(ErrorCode::kSchema, path + ": truncated checkpoint payload");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, path + ": bad checkpoint header: " + e.what());
  }
  return ck;
}

}  // namespace ens::model
