#include "ens/training/loop.hpp"

#include <filesystem>
#include <set>

#include "ens/core/error.hpp"
#include "ens/core/jsonl.hpp"
#include "ens/core/text.hpp"
#include "ens/model/checkpoint.hpp"
#include "ens/training/preference.hpp"
#include "ens/training/pseudo_label.hpp"
#include "ens/training/stages.hpp"

namespace ens::training {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json to_json(const IterationRecord& r) {
  return {{"iteration", r.iteration},
          {"sft_checkpoint", r.sft_checkpoint},
          {"sft_started_from", r.sft_started_from},
          {"sft_start_digest", r.sft_start_digest},
          {"dpo_checkpoint", r.dpo_checkpoint ? json(*r.dpo_checkpoint) : json(nullptr)},
          {"preference_pairs", r.preference_pairs},
          {"pseudo_labels", r.pseudo_labels},
          {"new_pseudo_labels", r.new_pseudo_labels},
          {"labeled", r.labeled},
          {"merged", r.merged},
          {"sft_initial_loss", r.sft_initial_loss},
          {"sft_final_loss", r.sft_final_loss},
          {"dpo_initial_loss", opt(r.dpo_initial_loss)},
          {"dpo_final_loss", opt(r.dpo_final_loss)}};
}

class RunWriter {
 public:
  RunWriter(const LoopOptions& o) : root_(o.runs_dir.empty() ? fs::path() : fs::path(o.runs_dir) / o.run_id) {}

  bool enabled() const { return !root_.empty(); }

  void checkpoint(const model::PolicyCheckpoint& ck) const {
    if (enabled()) model::save_checkpoint((root_ / "checkpoints" / model::checkpoint_name(ck.provenance)).string(), ck);
  }

  template <typename T>
  void records(int iteration, const std::string& name, const std::vector<T>& items) const {
    if (!enabled()) return;
    std::vector<json> docs;
    docs.reserve(items.size());
    for (const auto& it : items) docs.push_back(to_json(it));
    io::write_jsonl((root_ / ("iter-" + std::to_string(iteration)) / (name + ".jsonl")).string(), docs);
  }

  void state(const TrainingRunState& s) const {
    if (enabled()) io::write_file_atomic((root_ / "state.json").string(), to_json(s).dump(2) + "\n");
  }

 private:
  fs::path root_;
};

}  // namespace

json to_json(const TrainingRunState& s) {
  json iters = json::array();
  for (const auto& r : s.iterations) iters.push_back(to_json(r));
  return {{"run_id", s.run_id},     {"seed", s.seed},   {"base_checkpoint", s.base_checkpoint},
          {"base_digest", s.base_digest}, {"iterations", iters}, {"status", s.status},
          {"error", s.error},       {"config", s.config}};
}

TrainingRunState run_iterative_loop(const model::BackendFactory& base_factory,
                                    const model::Embedder& embedder,
                                    const std::vector<LabeledRecord>& labeled,
                                    const std::vector<UnlabeledRecord>& unlabeled,
                                    const TrainingConfig& config, const LoopOptions& options) {
  if (labeled.empty()) throw Error(ErrorCode::kEmptyBatch, "iterative loop needs labeled records");
  config.validate();
  auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };

  TrainingRunState state;
  state.run_id = options.run_id;
  state.seed = config.seed;
  state.config = to_key_values(config).values();
  const RunWriter out(options);

  try {
    {
      auto base = base_factory()->snapshot();
      state.base_checkpoint = model::checkpoint_name(base.provenance);
      state.base_digest = model::payload_digest(base.payload);
      out.checkpoint(base);
    }

    auto sft_round = [&](int iteration, const std::vector<LabeledRecord>& corpus, IterationRecord& rec) {
      auto result = run_supervised_init(base_factory, training_examples(corpus, config.mask), config, iteration);
      rec.sft_checkpoint = model::checkpoint_name(result.checkpoint.provenance);
      rec.sft_started_from = model::checkpoint_name(result.started_from);
      rec.sft_start_digest = result.started_from_digest;
      rec.sft_initial_loss = result.report.initial_loss();
      rec.sft_final_loss = result.report.final_loss();
      out.checkpoint(result.checkpoint);
      log(rec.sft_checkpoint + ": loss " + std::to_string(rec.sft_initial_loss) + " -> " +
          std::to_string(rec.sft_final_loss));
      return result.checkpoint;
    };

    IterationRecord first;
    first.labeled = first.merged = labeled.size();
    auto current = sft_round(0, labeled, first);
    state.final_policy = current;
    out.records(0, "merged", labeled);
    state.iterations.push_back(first);
    out.state(state);

    std::set<std::string> seen;
    std::map<std::string, PseudoLabelRecord> accumulated;  // dedup key -> record
    for (int i = 1; i <= config.iteration_limit; ++i) {
      const std::uint64_t round_seed = text::derive_seed(config.seed, 0x1007ULL, static_cast<std::uint64_t>(i));
      IterationRecord rec;
      rec.iteration = i;
      rec.labeled = labeled.size();

      auto policy = base_factory();
      policy->restore(current);
      const auto pairs = build_preference_set(*policy, embedder, unlabeled, config, text::derive_seed(round_seed, 1));
      rec.preference_pairs = pairs.size();
      out.records(i, "preferences", pairs);
      if (pairs.empty()) {
        log("iteration " + std::to_string(i) + ": no preference pairs, preference stage skipped");
      } else {
        auto dpo = run_dpo(base_factory, current, pairs, config, i);
        rec.dpo_checkpoint = model::checkpoint_name(dpo.checkpoint.provenance);
        rec.dpo_initial_loss = dpo.report.initial_loss();
        rec.dpo_final_loss = dpo.report.final_loss();
        out.checkpoint(dpo.checkpoint);
        policy->restore(dpo.checkpoint);
        log(*rec.dpo_checkpoint + ": " + std::to_string(pairs.size()) + " pairs, loss " +
            std::to_string(*rec.dpo_initial_loss) + " -> " + std::to_string(*rec.dpo_final_loss));
      }

      const auto pseudo = build_pseudo_labels(*policy, embedder, unlabeled, config, text::derive_seed(round_seed, 2));
      std::vector<PseudoLabelRecord> round_set;
      for (const auto& p : pseudo) {
        const auto key = dedup_key(p.context_id, p.rationale, config.mask);
        if (seen.insert(key).second) ++rec.new_pseudo_labels;
        if (config.accumulate_pseudo_labels) {
          accumulated.emplace(key, p);
        } else {
          round_set.push_back(p);
        }
      }
      if (config.accumulate_pseudo_labels) {
        for (const auto& [key, p] : accumulated) round_set.push_back(p);
      }
      rec.pseudo_labels = round_set.size();
      out.records(i, "pseudo_labels", round_set);

      std::vector<LabeledRecord> merged = labeled;
      for (const auto& p : round_set) merged.push_back(to_labeled(p));
      rec.merged = merged.size();
      out.records(i, "merged", merged);

      current = sft_round(i, merged, rec);
      state.iterations.push_back(rec);
      out.state(state);

      if (static_cast<double>(rec.new_pseudo_labels) <
          config.convergence_fraction * static_cast<double>(unlabeled.size())) {
        state.status = "converged";
        log("iteration " + std::to_string(i) + ": " + std::to_string(rec.new_pseudo_labels) +
            " new pseudo-labels, converged");
        break;
      }
    }
    state.final_policy = current;
    if (state.status == "running") state.status = "completed";
    out.state(state);
  } catch (const std::exception& e) {
    state.status = "failed";
    state.error = e.what();
    out.state(state);
    throw;
  }
  return state;
}

}  // namespace ens::training
