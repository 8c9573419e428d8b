#include "ens/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ens/core/error.hpp"
#include "ens/core/tagged.hpp"
#include "ens/core/text.hpp"
#include "ens/model/similarity.hpp"

namespace ens::eval {

std::vector<std::size_t> scored_positions(const std::vector<std::string>& tokens,
                                          bool include_rationale) {
  std::vector<std::size_t> all(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) all[i] = i;
  if (include_rationale) return all;
  const auto open = std::find(tokens.begin(), tokens.end(), kOpenAnswer);
  const auto close = std::find(tokens.begin(), tokens.end(), kCloseAnswer);
  if (open == tokens.end() || close == tokens.end() || close < open) return all;
  std::vector<std::size_t> out;
  for (auto it = open + 1; it != close; ++it) out.push_back(static_cast<std::size_t>(it - tokens.begin()));
  return out;
}

NllTotals perplexity_totals(const model::GenerativeBackend& backend,
                            std::span<const PerplexityRecord> records, bool include_rationale) {
  NllTotals t;
  for (const auto& r : records) {
    const auto lp = backend.score(r.prompt, r.target);
    for (auto i : scored_positions(backend.tokenize(r.target), include_rationale)) {
      t.nll -= lp.at(i);
      ++t.tokens;
    }
  }
  return t;
}

double perplexity(const model::GenerativeBackend& backend, std::span<const PerplexityRecord> records,
                  bool include_rationale) {
  if (records.empty()) throw Error(ErrorCode::kEmptyBatch, "perplexity of an empty corpus");
  const auto t = perplexity_totals(backend, records, include_rationale);
  if (t.tokens == 0) throw Error(ErrorCode::kEmptyTarget, "perplexity corpus has no scored tokens");
  return std::exp(t.nll / static_cast<double>(t.tokens));
}

namespace {

using Ngram = std::vector<std::string>;

std::map<Ngram, std::size_t> ngram_counts(const std::vector<std::string>& toks, std::size_t n) {
  std::map<Ngram, std::size_t> out;
  if (toks.size() < n) return out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) ++out[Ngram(toks.begin() + static_cast<std::ptrdiff_t>(i), toks.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return out;
}

}  // namespace

double bleu4(const std::vector<std::string>& candidates, const std::vector<std::string>& references) {
  if (candidates.size() != references.size()) {
    throw Error(ErrorCode::kLengthMismatch, "bleu4 needs aligned candidates and references");
  }
  std::size_t c_len = 0, r_len = 0;
  std::array<double, 4> matches{}, totals{};
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto c = text::metric_tokens(candidates[k]);
    const auto r = text::metric_tokens(references[k]);
    c_len += c.size();
    r_len += r.size();
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto cc = ngram_counts(c, n);
      const auto rc = ngram_counts(r, n);
      for (const auto& [g, cnt] : cc) {
        auto it = rc.find(g);
        matches[n - 1] += static_cast<double>(std::min(cnt, it == rc.end() ? 0 : it->second));
        totals[n - 1] += static_cast<double>(cnt);
      }
    }
  }
  if (c_len == 0 || matches[0] == 0.0) return 0.0;
  double log_p = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    const double p = (n > 0 && matches[n] == 0.0) ? 1.0 / (totals[n] + 1.0) : matches[n] / totals[n];
    log_p += 0.25 * std::log(p);
  }
  const double bp = c_len > r_len ? 1.0 : std::exp(1.0 - static_cast<double>(r_len) / static_cast<double>(c_len));
  return std::clamp(bp * std::exp(log_p), 0.0, 1.0);
}

double distinct3(const std::vector<std::string>& candidates) {
  std::set<Ngram> unique;
  std::size_t total = 0;
  for (const auto& c : candidates) {
    for (const auto& [g, cnt] : ngram_counts(text::metric_tokens(c), 3)) {
      unique.insert(g);
      total += cnt;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(unique.size()) / static_cast<double>(total);
}

double embedding_f1_pair(const std::string& candidate, const std::string& reference,
                         const model::Embedder& embedder) {
  const auto c = text::metric_tokens(candidate);
  const auto r = text::metric_tokens(reference);
  if (c.empty() || r.empty()) return c.empty() && r.empty() ? 1.0 : 0.0;
  std::vector<std::vector<double>> ce, re;
  for (const auto& t : c) ce.push_back(embedder.embed(t));
  for (const auto& t : r) re.push_back(embedder.embed(t));
  std::vector<std::vector<double>> sim(c.size(), std::vector<double>(r.size(), 0.0));
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      try {
        sim[i][j] = std::max(0.0, model::cosine_similarity(ce[i], re[j]));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kZeroVector) throw;
      }
    }
  }
  double p = 0.0, rec = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) p += *std::max_element(sim[i].begin(), sim[i].end());
  for (std::size_t j = 0; j < r.size(); ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) best = std::max(best, sim[i][j]);
    rec += best;
  }
  p /= static_cast<double>(c.size());
  rec /= static_cast<double>(r.size());
  return p + rec == 0.0 ? 0.0 : 2.0 * p * rec / (p + rec);
}

double embedding_f1(const std::vector<std::string>& candidates,
                    const std::vector<std::string>& references, const model::Embedder& embedder) {
  if (candidates.size() != references.size()) {
    throw Error(ErrorCode::kLengthMismatch, "embedding_f1 needs aligned candidates and references");
  }
  if (candidates.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    sum += embedding_f1_pair(candidates[k], references[k], embedder);
  }
  return sum / static_cast<double>(candidates.size());
}

double response_length(const std::vector<std::string>& candidates) {
  if (candidates.empty()) return 0.0;
  std::size_t n = 0;
  for (const auto& c : candidates) n += text::metric_tokens(c).size();
  return static_cast<double>(n) / static_cast<double>(candidates.size());
}

std::optional<double> emotion_appropriateness(const std::vector<EmotionRecord>& records,
                                              const EmotionJudge& judge) {
  if (records.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& r : records) {
    sum += judge ? std::clamp(judge(r), 0.0, 1.0) : (r.predicted == r.reference ? 1.0 : 0.0);
  }
  return sum / static_cast<double>(records.size());
}

NearestCentroidJudge::NearestCentroidJudge(const model::Embedder& embedder) : embedder_(&embedder) {
  for (auto s : all_strategies()) centroids_.push_back(embedder.embed(exemplar_utterance(s)));
}

std::optional<Strategy> NearestCentroidJudge::nearest(const std::string& response) const {
  const auto v = embedder_->embed(response);
  double best = -2.0;
  std::optional<Strategy> arg;
  bool tie = false;
  for (std::size_t i = 0; i < centroids_.size(); ++i) {
    double s;
    try {
      s = model::cosine_similarity(v, centroids_[i]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kZeroVector) throw;
      return std::nullopt;
    }
    if (s > best) {
      best = s;
      arg = all_strategies()[i];
      tie = false;
    } else if (s == best) {
      tie = true;
    }
  }
  return tie ? std::nullopt : arg;
}

double NearestCentroidJudge::operator()(const StrategyRecord& r) const {
  return nearest(r.response) == r.strategy ? 1.0 : 0.0;
}

std::optional<double> strategy_consistency(const std::vector<StrategyRecord>& records,
                                           const StrategyJudge& judge) {
  if (records.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& r : records) sum += std::clamp(judge(r), 0.0, 1.0);
  return sum / static_cast<double>(records.size());
}

}  // namespace ens::eval
