#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ens/model/backend.hpp"
#include "ens/training/config.hpp"
#include "ens/training/records.hpp"

namespace ens::training {

struct IterationRecord {
  int iteration = 0;
  std::string sft_checkpoint;          // "sft-<i>"
  std::string sft_started_from;        // checkpoint name of the start parameters
  std::string sft_start_digest;        // fnv1a of the start payload
  std::optional<std::string> dpo_checkpoint;
  std::size_t preference_pairs = 0;
  std::size_t pseudo_labels = 0;       // |D'_S| used this round
  std::size_t new_pseudo_labels = 0;   // never seen in an earlier round
  std::size_t labeled = 0;             // |D_L|
  std::size_t merged = 0;              // |D_N|
  double sft_initial_loss = 0.0;
  double sft_final_loss = 0.0;
  std::optional<double> dpo_initial_loss;
  std::optional<double> dpo_final_loss;
};

struct TrainingRunState {
  std::string run_id;
  std::uint64_t seed = 0;
  std::string base_checkpoint;  // "base-0"
  std::string base_digest;
  std::vector<IterationRecord> iterations;
  std::string status = "running";  // running | completed | converged | failed
  std::string error;
  std::map<std::string, std::string> config;
  // Last supervised policy; kept in memory only.
  std::optional<model::PolicyCheckpoint> final_policy;
};

nlohmann::json to_json(const TrainingRunState& state);

struct LoopOptions {
  std::string run_id = "run";
  // Root of runs/<run-id>/; empty disables persistence.
  std::string runs_dir;
  std::function<void(const std::string&)> log;
};

// Supervised init, then per iteration: DPO on the previous SFT policy,
// pseudo-labels from the refined policy, and SFT of a fresh base backend on
// D_L plus the pseudo-labels. On a stage error the state is persisted with
// status "failed" and the error is rethrown.
TrainingRunState run_iterative_loop(const model::BackendFactory& base_factory,
                                    const model::Embedder& embedder,
                                    const std::vector<LabeledRecord>& labeled,
                                    const std::vector<UnlabeledRecord>& unlabeled,
                                    const TrainingConfig& config, const LoopOptions& options);

}  // namespace ens::training
