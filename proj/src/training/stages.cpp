#include "ens/training/stages.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "ens/core/error.hpp"
#include "ens/core/random.hpp"
#include "ens/core/text.hpp"
#include "ens/model/checkpoint.hpp"
#include "ens/training/losses.hpp"

namespace ens::training {

double cosine_learning_rate(std::size_t step, std::size_t total, double base, double warmup_ratio) {
  if (total == 0) return base;
  const auto warmup = static_cast<std::size_t>(std::ceil(warmup_ratio * static_cast<double>(total)));
  if (step < warmup) return base * static_cast<double>(step + 1) / static_cast<double>(warmup + 1);
  const double span = static_cast<double>(total - warmup);
  const double progress = span > 0 ? static_cast<double>(step - warmup) / span : 0.0;
  return base * 0.5 * (1.0 + std::cos(M_PI * progress));
}

namespace {

constexpr int kMaxHalvings = 6;

// Shared minibatch driver. `objective` evaluates the full training loss,
// `gradient` builds the step for one index range.
StageReport descend(model::GenerativeBackend& backend, std::size_t n, int epochs,
                    std::size_t batch_size, double base_lr, const TrainingConfig& config,
                    std::uint64_t shuffle_seed, const std::function<double()>& objective,
                    const std::function<std::vector<model::WeightedSequence>(
                        const std::vector<std::size_t>&)>& gradient) {
  StageReport report;
  double current = objective();
  report.loss_curve.push_back(current);
  const std::size_t per_epoch = (n + batch_size - 1) / batch_size;
  const std::size_t total = per_epoch * static_cast<std::size_t>(epochs);

  std::vector<std::size_t> order(n);
  std::size_t step = 0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 g(text::derive_seed(shuffle_seed, static_cast<std::uint64_t>(epoch)));
    rng::shuffle(order, g);
    for (std::size_t start = 0; start < n; start += batch_size, ++step) {
      std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                   order.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + batch_size)));
      const auto grads = gradient(idx);
      model::StepOptions opt;
      opt.learning_rate = cosine_learning_rate(step, total, base_lr, config.warmup_ratio);
      opt.grad_clip = config.grad_clip;
      ++report.steps;
      if (opt.learning_rate <= 0.0) {
        report.loss_curve.push_back(current);
        continue;
      }
      if (!config.descent_guard) {
        backend.train_step(grads, opt);
        current = objective();
        report.loss_curve.push_back(current);
        continue;
      }
      const auto before = backend.snapshot();
      bool accepted = false;
      for (int attempt = 0; attempt <= kMaxHalvings; ++attempt) {
        backend.train_step(grads, opt);
        const double next = objective();
        if (next <= current) {
          current = next;
          accepted = true;
          break;
        }
        backend.restore(before);
        opt.learning_rate *= 0.5;
      }
      if (!accepted) ++report.rejected_steps;
      report.loss_curve.push_back(current);
    }
  }
  return report;
}

}  // namespace

StageResult run_supervised_init(const model::BackendFactory& base_factory,
                                const std::vector<TrainingExample>& examples,
                                const TrainingConfig& config, int iteration) {
  if (examples.empty()) throw Error(ErrorCode::kEmptyBatch, "supervised stage on an empty corpus");
  auto backend = base_factory();
  if (!backend) throw Error(ErrorCode::kBackend, "backend factory returned null");
  StageResult result;
  const auto start = backend->snapshot();
  result.started_from = start.provenance;
  result.started_from_digest = model::payload_digest(start.payload);
  if (!model::is_valid_transition(start.provenance.stage, model::Stage::kSft)) {
    throw Error(ErrorCode::kInvariant, "supervised stage must start from a base checkpoint");
  }

  const std::span<const TrainingExample> all(examples);
  result.report = descend(
      *backend, examples.size(), config.sft_epochs, config.sft_batch_size,
      config.sft_learning_rate, config,
      text::derive_seed(config.seed, 0x5f7ULL, static_cast<std::uint64_t>(iteration)),
      [&] { return sft_loss(*backend, all); },
      [&](const std::vector<std::size_t>& idx) {
        std::vector<TrainingExample> batch;
        for (auto i : idx) batch.push_back(examples[i]);
        return sft_gradient(batch);
      });

  result.checkpoint = backend->snapshot();
  result.checkpoint.provenance = {start.provenance.base_model_id, iteration, model::Stage::kSft};
  return result;
}

StageResult run_dpo(const model::BackendFactory& base_factory,
                    const model::PolicyCheckpoint& sft_checkpoint,
                    const std::vector<PreferencePair>& pairs, const TrainingConfig& config,
                    int iteration) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyBatch, "preference stage with no pairs");
  if (!model::is_valid_transition(sft_checkpoint.provenance.stage, model::Stage::kDpo)) {
    throw Error(ErrorCode::kInvariant, "preference stage must start from an sft checkpoint");
  }
  auto reference = base_factory();
  auto policy = base_factory();
  if (!reference || !policy) throw Error(ErrorCode::kBackend, "backend factory returned null");
  reference->restore(sft_checkpoint);
  policy->restore(sft_checkpoint);
  const auto ref = reference_scores(*reference, pairs, config.dpo_score_mode);
  reference.reset();

  StageResult result;
  result.started_from = sft_checkpoint.provenance;
  result.started_from_digest = model::payload_digest(sft_checkpoint.payload);
  const std::span<const PreferencePair> all(pairs);
  result.report = descend(
      *policy, pairs.size(), config.dpo_epochs, config.dpo_batch_size, config.dpo_learning_rate,
      config, text::derive_seed(config.seed, 0xd90ULL, static_cast<std::uint64_t>(iteration)),
      [&] { return dpo_loss(*policy, ref, all, config.beta, config.dpo_score_mode); },
      [&](const std::vector<std::size_t>& idx) {
        std::vector<model::WeightedSequence> out;
        for (auto i : idx) {
          auto g = dpo_gradient(*policy, ref, i, all.subspan(i, 1), config.beta,
                                config.dpo_score_mode);
          for (auto& w : g) {
            w.coefficient /= static_cast<double>(idx.size());
            out.push_back(std::move(w));
          }
        }
        return out;
      });

  result.checkpoint = policy->snapshot();
  result.checkpoint.provenance = {sft_checkpoint.provenance.base_model_id, iteration,
                                  model::Stage::kDpo};
  return result;
}

}  // namespace ens::training
