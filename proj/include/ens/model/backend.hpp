#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ens::model {

struct Decoding {
  double temperature = 0.7;
  double top_p = 1.0;
  // Per-request seed; identical (checkpoint, prompt, decoding) reproduce the
  // same completions.
  std::uint64_t seed = 0;
};

// One term of an objective's gradient: the objective's derivative with
// respect to log pi(target | prompt). A backend step moves parameters along
// -sum(coefficient * grad log pi).
struct WeightedSequence {
  std::string prompt;
  std::string target;
  double coefficient = 0.0;
};

struct StepOptions {
  double learning_rate = 0.1;
  double grad_clip = 1.0;  // global L2 norm; <= 0 disables
};

enum class Stage { kBase, kSft, kDpo };

std::string_view to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view s);
// Allowed provenance transitions: base -> sft -> dpo.
bool is_valid_transition(Stage from, Stage to);

struct Provenance {
  std::string base_model_id;
  int iteration = 0;
  Stage stage = Stage::kBase;

  bool operator==(const Provenance&) const = default;
};

struct PolicyCheckpoint {
  std::string payload;  // opaque parameter bytes
  Provenance provenance;

  bool operator==(const PolicyCheckpoint&) const = default;
};

// Capability contract for a trainable generative model. score and sample are
// const and safe for concurrent callers; train_step and restore need
// exclusive access.
class GenerativeBackend {
 public:
  virtual ~GenerativeBackend() = default;

  virtual std::string model_id() const = 0;
  virtual std::vector<std::string> tokenize(std::string_view text) const = 0;
  // Per-token log-probabilities of `target` continuing `prompt`.
  virtual std::vector<double> score(std::string_view prompt, std::string_view target) const = 0;
  virtual std::vector<std::string> sample(std::string_view prompt, const Decoding& decoding,
                                          std::size_t count) const = 0;
  virtual void train_step(std::span<const WeightedSequence> batch, const StepOptions& options) = 0;
  // Provenance defaults to {model_id(), 0, base}; callers stamp the stage.
  virtual PolicyCheckpoint snapshot() const = 0;
  virtual void restore(const PolicyCheckpoint& checkpoint) = 0;
};

using BackendFactory = std::function<std::unique_ptr<GenerativeBackend>()>;

// Text embedder contract: same text, same vector; fixed dimension.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<double> embed(std::string_view text) const = 0;
};

}  // namespace ens::model
