#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ens/model/backend.hpp"

namespace ens::model {

// Candidate completions keyed by prompt hash, plus a fallback list used for
// prompts the table does not know.
class ScriptTable {
 public:
  void add(std::string_view prompt, std::vector<std::string> candidates);
  void set_fallback(std::vector<std::string> candidates);

  const std::vector<std::string>* lookup(std::string_view prompt) const;
  std::size_t size() const { return by_prompt_.size(); }
  const std::vector<std::string>& fallback() const { return fallback_; }

  // Line-delimited JSON: {"prompt_hash": "<hex>", "candidates": [...]} and
  // at most one {"fallback": [...]} line.
  void save(const std::string& path) const;
  static ScriptTable load(const std::string& path);

 private:
  std::map<std::uint64_t, std::vector<std::string>> by_prompt_;
  std::vector<std::string> fallback_;
};

struct MockBackendConfig {
  std::string model_id = "mock-bigram";
  std::uint64_t seed = 7;
  std::size_t context_buckets = 64;
  std::size_t vocab_buckets = 512;
  double init_scale = 0.01;
  // When set, every token scores log(p) and training is a no-op.
  std::optional<double> fixed_token_prob;
  // Candidate choice uses softmax(sharpness * mean token logprob / T).
  double sharpness = 8.0;
  std::shared_ptr<const ScriptTable> script;
};

// Deterministic desk-scale backend: a hashed bigram log-linear model over
// whitespace tokens. Scoring is closed form, sampling picks among scripted
// candidates in proportion to their tempered model likelihood, and training
// is plain gradient descent on the log-likelihood surrogate.
class MockBackend final : public GenerativeBackend {
 public:
  explicit MockBackend(MockBackendConfig config);

  std::string model_id() const override { return config_.model_id; }
  std::vector<std::string> tokenize(std::string_view text) const override;
  std::vector<double> score(std::string_view prompt, std::string_view target) const override;
  std::vector<std::string> sample(std::string_view prompt, const Decoding& decoding,
                                  std::size_t count) const override;
  void train_step(std::span<const WeightedSequence> batch, const StepOptions& options) override;
  PolicyCheckpoint snapshot() const override;
  void restore(const PolicyCheckpoint& checkpoint) override;

  const MockBackendConfig& config() const { return config_; }

  // Probability the sampler assigns to each scripted candidate.
  std::vector<double> candidate_distribution(std::string_view prompt, const Decoding& decoding) const;

 private:
  std::size_t row_of(std::string_view prev) const;
  std::size_t col_of(std::string_view token) const;
  void refresh_row(std::size_t row);
  const std::vector<std::string>& candidates_for(std::string_view prompt) const;

  MockBackendConfig config_;
  std::vector<double> weights_;  // context_buckets x vocab_buckets
  std::vector<double> row_lse_;
};

BackendFactory mock_factory(MockBackendConfig config);

}  // namespace ens::model
