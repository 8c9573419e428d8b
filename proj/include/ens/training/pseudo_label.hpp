#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ens/core/rationale.hpp"
#include "ens/model/backend.hpp"
#include "ens/training/config.hpp"
#include "ens/training/preference.hpp"
#include "ens/training/records.hpp"

namespace ens::training {

struct PseudoLabelRecord {
  std::string context_id;
  std::vector<Turn> context;
  EnsCotRationale rationale;  // rationale.response holds the ground truth
  std::string response;       // ground-truth response y
  double similarity = 0.0;

  bool operator==(const PseudoLabelRecord&) const = default;
};

// (context id, normalized rendered rationale body).
std::string dedup_key(const std::string& context_id, const EnsCotRationale& rationale,
                      AblationMask mask);

// Keeps parseable samples with similarity > tau3, first occurrence per dedup
// key, in sample order.
std::vector<PseudoLabelRecord> select_pseudo_labels(const UnlabeledRecord& record,
                                                    const std::vector<ScoredCompletion>& samples,
                                                    double tau3, AblationMask mask);

std::vector<PseudoLabelRecord> build_pseudo_labels(const model::GenerativeBackend& policy,
                                                   const model::Embedder& embedder,
                                                   const std::vector<UnlabeledRecord>& corpus,
                                                   const TrainingConfig& config,
                                                   std::uint64_t round_seed);

LabeledRecord to_labeled(const PseudoLabelRecord& record);

nlohmann::json to_json(const PseudoLabelRecord& record);

}  // namespace ens::training
