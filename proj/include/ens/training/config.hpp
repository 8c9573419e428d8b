#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ens/core/rationale.hpp"

namespace ens {

// Flat "key = value" configuration with '#' comments. Later sources
// override earlier ones.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& content, const std::string& origin = "<string>");
  static KeyValueConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  // "key=value"
  void apply_override(const std::string& assignment);
  void merge(const KeyValueConfig& other);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string require(const std::string& key) const;  // Error(kConfig) naming the key

  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  std::string dump() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace ens

namespace ens::training {

enum class DpoScoreMode { kFullTarget, kRationaleOnly };

struct TrainingConfig {
  double tau1 = 0.8;
  double tau2 = 0.4;
  double tau3 = 0.8;
  double beta = 0.1;
  std::size_t k = 5;
  std::size_t m = 3;
  double sample_temperature = 0.7;
  double sample_top_p = 1.0;
  int iteration_limit = 3;
  // Stop once a round yields fewer than this fraction of |D_U| new unique
  // pseudo-labels.
  double convergence_fraction = 0.01;
  std::uint64_t seed = 0;

  std::size_t max_pairs_per_context = 4;  // 0 = unlimited
  DpoScoreMode dpo_score_mode = DpoScoreMode::kFullTarget;
  bool accumulate_pseudo_labels = false;
  AblationMask mask = AblationMask::full();

  // Backend-side step settings (the mock uses plain gradient descent).
  int sft_epochs = 2;
  std::size_t sft_batch_size = 2;
  double sft_learning_rate = 0.5;
  int dpo_epochs = 2;
  std::size_t dpo_batch_size = 2;
  double dpo_learning_rate = 0.5;
  double grad_clip = 1.0;
  double warmup_ratio = 0.1;
  // Reject steps that raise the training objective (halve and retry).
  bool descent_guard = true;

  // Optimizer record forwarded to external adapters.
  std::string optimizer = "adamw";
  double optimizer_learning_rate = 3e-7;
  double weight_decay = 0.01;
  std::string lr_schedule = "cosine";

  std::size_t parallelism = 1;
  int generation_retry_limit = 2;

  // Throws Error(kConfig) on violated invariants.
  void validate() const;
};

// Keys that a run configuration file must define.
const std::vector<std::string>& required_config_keys();

// Reads the documented keys; `require_all` enforces required_config_keys().
TrainingConfig training_config_from(const KeyValueConfig& kv, bool require_all);
KeyValueConfig to_key_values(const TrainingConfig& config);

}  // namespace ens::training
