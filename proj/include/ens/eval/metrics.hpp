#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ens/core/catalog.hpp"
#include "ens/model/backend.hpp"

namespace ens::eval {

struct PerplexityRecord {
  std::string prompt;
  std::string target;  // tagged target, or a bare response
};

struct NllTotals {
  double nll = 0.0;
  std::size_t tokens = 0;
};

// Token positions of the answer span when `target` is tagged; all positions
// otherwise or when `include_rationale` is set.
std::vector<std::size_t> scored_positions(const std::vector<std::string>& target_tokens,
                                          bool include_rationale);

NllTotals perplexity_totals(const model::GenerativeBackend& backend,
                            std::span<const PerplexityRecord> records, bool include_rationale);

// exp(corpus mean per-token NLL). Throws EmptyBatch.
double perplexity(const model::GenerativeBackend& backend, std::span<const PerplexityRecord> records,
                  bool include_rationale = false);

// Corpus BLEU-4 over metric tokens, uniform weights, brevity penalty.
// Zero higher-order match counts get add-one smoothing. Throws LengthMismatch.
double bleu4(const std::vector<std::string>& candidates, const std::vector<std::string>& references);

// Unique / total trigrams pooled over utterances; 0 when there are none.
double distinct3(const std::vector<std::string>& candidates);

// Greedy token matching F1 per pair (cosine clamped at 0), averaged.
double embedding_f1(const std::vector<std::string>& candidates,
                    const std::vector<std::string>& references, const model::Embedder& embedder);
double embedding_f1_pair(const std::string& candidate, const std::string& reference,
                         const model::Embedder& embedder);

// Mean metric-token count; 0 for no candidates.
double response_length(const std::vector<std::string>& candidates);

struct EmotionRecord {
  std::optional<Emotion> predicted;
  Emotion reference;
};
using EmotionJudge = std::function<double(const EmotionRecord&)>;

// Mean judge score; default judge is exact match. nullopt when empty.
std::optional<double> emotion_appropriateness(const std::vector<EmotionRecord>& records,
                                              const EmotionJudge& judge = {});

struct StrategyRecord {
  Strategy strategy;
  std::string response;
};
using StrategyJudge = std::function<double(const StrategyRecord&)>;

// Scores 1 when the response embeds strictly closer to its declared
// strategy's exemplar centroid than to every other strategy's centroid.
class NearestCentroidJudge {
 public:
  explicit NearestCentroidJudge(const model::Embedder& embedder);

  double operator()(const StrategyRecord& record) const;
  std::optional<Strategy> nearest(const std::string& response) const;

 private:
  const model::Embedder* embedder_;
  std::vector<std::vector<double>> centroids_;  // catalog order
};

// Mean judge score; nullopt ("insufficient data") when empty.
std::optional<double> strategy_consistency(const std::vector<StrategyRecord>& records,
                                           const StrategyJudge& judge);

}  // namespace ens::eval
