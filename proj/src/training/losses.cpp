#include "ens/training/losses.hpp"

#include <cmath>

#include "ens/core/error.hpp"
#include "ens/core/tagged.hpp"
#include "ens/model/similarity.hpp"

namespace ens::training {

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double sft_loss(const model::GenerativeBackend& backend, std::span<const TrainingExample> batch) {
  if (batch.empty()) throw Error(ErrorCode::kEmptyBatch, "sft_loss on an empty batch");
  double sum = 0.0;
  for (const auto& ex : batch) sum -= model::sequence_logprob(backend, ex.prompt, ex.target).total;
  return sum / static_cast<double>(batch.size());
}

std::vector<model::WeightedSequence> sft_gradient(std::span<const TrainingExample> batch) {
  if (batch.empty()) throw Error(ErrorCode::kEmptyBatch, "sft gradient on an empty batch");
  std::vector<model::WeightedSequence> out;
  out.reserve(batch.size());
  const double coef = -1.0 / static_cast<double>(batch.size());
  for (const auto& ex : batch) out.push_back({ex.prompt, ex.target, coef});
  return out;
}

double dpo_pair_loss(double gap, double beta) { return softplus(-beta * gap); }

std::string dpo_scored_text(const std::string& completion, DpoScoreMode mode) {
  if (mode == DpoScoreMode::kRationaleOnly) {
    if (auto span = rationale_span(completion)) return *span;
  }
  return completion;
}

ReferenceScores reference_scores(const model::GenerativeBackend& reference,
                                 std::span<const PreferencePair> pairs, DpoScoreMode mode) {
  ReferenceScores out;
  out.preferred.reserve(pairs.size());
  out.rejected.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.preferred.push_back(
        model::sequence_logprob(reference, p.prompt, dpo_scored_text(p.preferred, mode)).total);
    out.rejected.push_back(
        model::sequence_logprob(reference, p.prompt, dpo_scored_text(p.rejected, mode)).total);
  }
  return out;
}

namespace {

double log_ratio_gap(const model::GenerativeBackend& policy, const ReferenceScores& ref,
                     std::size_t i, const PreferencePair& p, DpoScoreMode mode) {
  const double lp_w =
      model::sequence_logprob(policy, p.prompt, dpo_scored_text(p.preferred, mode)).total;
  const double lp_l =
      model::sequence_logprob(policy, p.prompt, dpo_scored_text(p.rejected, mode)).total;
  return (lp_w - ref.preferred[i]) - (lp_l - ref.rejected[i]);
}

}  // namespace

double dpo_loss(const model::GenerativeBackend& policy, const ReferenceScores& reference,
                std::span<const PreferencePair> pairs, double beta, DpoScoreMode mode) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyBatch, "dpo_loss on an empty batch");
  if (reference.preferred.size() != pairs.size() || reference.rejected.size() != pairs.size()) {
    throw Error(ErrorCode::kLengthMismatch, "reference scores do not cover the pair batch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    sum += dpo_pair_loss(log_ratio_gap(policy, reference, i, pairs[i], mode), beta);
  }
  return sum / static_cast<double>(pairs.size());
}

double dpo_loss(const model::GenerativeBackend& policy, const model::GenerativeBackend& reference,
                std::span<const PreferencePair> pairs, double beta, DpoScoreMode mode) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyBatch, "dpo_loss on an empty batch");
  return dpo_loss(policy, reference_scores(reference, pairs, mode), pairs, beta, mode);
}

std::vector<model::WeightedSequence> dpo_gradient(const model::GenerativeBackend& policy,
                                                  const ReferenceScores& reference,
                                                  std::size_t offset,
                                                  std::span<const PreferencePair> pairs,
                                                  double beta, DpoScoreMode mode) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyBatch, "dpo gradient on an empty batch");
  std::vector<model::WeightedSequence> out;
  out.reserve(2 * pairs.size());
  const double n = static_cast<double>(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    const double gap = log_ratio_gap(policy, reference, offset + i, p, mode);
    // d softplus(-beta z) / dz = -beta * sigma(-beta z)
    const double w = beta * logistic(-beta * gap) / n;
    out.push_back({p.prompt, dpo_scored_text(p.preferred, mode), -w});
    out.push_back({p.prompt, dpo_scored_text(p.rejected, mode), w});
  }
  return out;
}

}  // namespace ens::training
