#pragma once

#include <span>
#include <string>
#include <vector>

#include "ens/model/backend.hpp"
#include "ens/training/config.hpp"
#include "ens/training/preference.hpp"
#include "ens/training/records.hpp"

namespace ens::training {

// log(1 + e^x) without overflow.
double softplus(double x);
double logistic(double x);

// Mean over examples of the summed token negative log-likelihood.
// Throws EmptyBatch / EmptyTarget.
double sft_loss(const model::GenerativeBackend& backend, std::span<const TrainingExample> batch);

// Coefficients of d(sft_loss)/d(log pi) for one minibatch.
std::vector<model::WeightedSequence> sft_gradient(std::span<const TrainingExample> batch);

// -log sigma(beta * gap), gap = preferred log-ratio minus rejected log-ratio.
double dpo_pair_loss(double gap, double beta);

// Text whose likelihood the DPO objective scores for a completion.
std::string dpo_scored_text(const std::string& completion, DpoScoreMode mode);

// Reference log-probabilities, computed once per DPO stage.
struct ReferenceScores {
  std::vector<double> preferred;
  std::vector<double> rejected;
};

ReferenceScores reference_scores(const model::GenerativeBackend& reference,
                                 std::span<const PreferencePair> pairs, DpoScoreMode mode);

double dpo_loss(const model::GenerativeBackend& policy, const ReferenceScores& reference,
                std::span<const PreferencePair> pairs, double beta,
                DpoScoreMode mode = DpoScoreMode::kFullTarget);
double dpo_loss(const model::GenerativeBackend& policy, const model::GenerativeBackend& reference,
                std::span<const PreferencePair> pairs, double beta,
                DpoScoreMode mode = DpoScoreMode::kFullTarget);

// Pair i uses reference entries offset + i.
std::vector<model::WeightedSequence> dpo_gradient(const model::GenerativeBackend& policy,
                                                  const ReferenceScores& reference,
                                                  std::size_t offset,
                                                  std::span<const PreferencePair> pairs,
                                                  double beta, DpoScoreMode mode);

}  // namespace ens::training
