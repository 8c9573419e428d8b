#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ens/model/backend.hpp"
#include "ens/training/config.hpp"
#include "ens/training/records.hpp"

namespace ens::training {

struct PreferencePair {
  std::string context_id;
  std::string prompt;
  std::string preferred;  // full tagged completion
  std::string rejected;
  double preferred_similarity = 0.0;
  // nullopt: the rejected completion did not parse.
  std::optional<double> rejected_similarity;

  bool operator==(const PreferencePair&) const = default;
};

// One scored sample. nullopt similarity marks an unparseable completion.
struct ScoredCompletion {
  std::string text;
  std::optional<double> similarity;
};

// Cross product of preferred-eligible (> tau1) and rejected-eligible (< tau2
// or unparseable) samples, in sample order, truncated to `max_pairs`
// (0 = unlimited).
std::vector<PreferencePair> select_preference_pairs(const std::string& context_id,
                                                    const std::string& prompt,
                                                    const std::vector<ScoredCompletion>& samples,
                                                    double tau1, double tau2,
                                                    std::size_t max_pairs);

// Samples k completions per context from `policy` and pairs them.
std::vector<PreferencePair> build_preference_set(const model::GenerativeBackend& policy,
                                                 const model::Embedder& embedder,
                                                 const std::vector<UnlabeledRecord>& corpus,
                                                 const TrainingConfig& config,
                                                 std::uint64_t round_seed);

// Samples `count` completions for every record and scores them against the
// record's ground-truth response. Fans out over config.parallelism threads;
// results are in corpus order regardless.
std::vector<std::vector<ScoredCompletion>> sample_and_score(
    const model::GenerativeBackend& policy, const model::Embedder& embedder,
    const std::vector<UnlabeledRecord>& corpus, const TrainingConfig& config, std::size_t count,
    std::uint64_t round_seed);

nlohmann::json to_json(const PreferencePair& pair);
PreferencePair preference_pair_from_json(const nlohmann::json& j);

}  // namespace ens::training
