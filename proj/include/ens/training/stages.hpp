#pragma once

#include <vector>

#include "ens/model/backend.hpp"
#include "ens/training/config.hpp"
#include "ens/training/preference.hpp"
#include "ens/training/records.hpp"

namespace ens::training {

// Linear warmup then cosine decay to zero over `total` steps.
double cosine_learning_rate(std::size_t step, std::size_t total, double base, double warmup_ratio);

struct StageReport {
  // Training objective before the first step, then after every step.
  std::vector<double> loss_curve;
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;  // steps the descent guard skipped

  double initial_loss() const { return loss_curve.front(); }
  double final_loss() const { return loss_curve.back(); }
};

struct StageResult {
  model::PolicyCheckpoint checkpoint;
  // Provenance of the parameters training started from.
  model::Provenance started_from;
  std::string started_from_digest;
  StageReport report;
};

// Trains a fresh backend from `base_factory` on `examples`.
StageResult run_supervised_init(const model::BackendFactory& base_factory,
                                const std::vector<TrainingExample>& examples,
                                const TrainingConfig& config, int iteration);

// Trains a copy of `sft_checkpoint` against a frozen reference copy.
StageResult run_dpo(const model::BackendFactory& base_factory,
                    const model::PolicyCheckpoint& sft_checkpoint,
                    const std::vector<PreferencePair>& pairs, const TrainingConfig& config,
                    int iteration);

}  // namespace ens::training
