#include "ens/model/mock_backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>

#include <json.hpp>

#include "ens/core/error.hpp"
#include "ens/core/jsonl.hpp"
#include "ens/core/random.hpp"
#include "ens/core/text.hpp"

namespace ens::model {

namespace {

constexpr std::string_view kBos = "<s>";

std::string to_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

std::uint64_t from_hex(const std::string& s) { return std::stoull(s, nullptr, 16); }

using rng::gaussian;
using rng::unit;

}  // namespace

void ScriptTable::add(std::string_view prompt, std::vector<std::string> candidates) {
  by_prompt_[text::fnv1a(prompt)] = std::move(candidates);
}

void ScriptTable::set_fallback(std::vector<std::string> candidates) {
  fallback_ = std::move(candidates);
}

const std::vector<std::string>* ScriptTable::lookup(std::string_view prompt) const {
  auto it = by_prompt_.find(text::fnv1a(prompt));
  if (it != by_prompt_.end()) return &it->second;
  return fallback_.empty() ? nullptr : &fallback_;
}

void ScriptTable::save(const std::string& path) const {
  std::vector<nlohmann::json> docs;
  for (const auto& [hash, cands] : by_prompt_) {
    docs.push_back({{"prompt_hash", to_hex(hash)}, {"candidates", cands}});
  }
  if (!fallback_.empty()) docs.push_back({{"fallback", fallback_}});
  io::write_jsonl(path, docs);
}

ScriptTable ScriptTable::load(const std::string& path) {
  ScriptTable table;
  for (const auto& doc : io::read_jsonl(path)) {
    try {
      if (doc.contains("fallback")) {
        table.fallback_ = doc.at("fallback").get<std::vector<std::string>>();
      } else {
        table.by_prompt_[from_hex(doc.at("prompt_hash").get<std::string>())] =
            doc.at("candidates").get<std::vector<std::string>>();
      }
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kSchema, path + ": bad script entry: " + e.what());
    }
  }
  return table;
}

MockBackend::MockBackend(MockBackendConfig config) : config_(std::move(config)) {
  if (config_.context_buckets == 0 || config_.vocab_buckets < 2) {
    throw Error(ErrorCode::kBackend, "mock backend needs >= 1 context and >= 2 vocab buckets");
  }
  if (config_.fixed_token_prob &&
      !(*config_.fixed_token_prob > 0.0 && *config_.fixed_token_prob <= 1.0)) {
    throw Error(ErrorCode::kBackend, "fixed token probability must lie in (0, 1]");
  }
  weights_.resize(config_.context_buckets * config_.vocab_buckets);
  std::mt19937_64 rng(text::derive_seed(config_.seed, 0x6d6f636bULL));
  for (auto& w : weights_) w = config_.init_scale * gaussian(rng);
  row_lse_.resize(config_.context_buckets);
  for (std::size_t r = 0; r < config_.context_buckets; ++r) refresh_row(r);
}

std::vector<std::string> MockBackend::tokenize(std::string_view t) const {
  return text::split_whitespace(t);
}

std::size_t MockBackend::row_of(std::string_view prev) const {
  return text::fnv1a(prev) % config_.context_buckets;
}

std::size_t MockBackend::col_of(std::string_view token) const {
  return text::mix64(text::fnv1a(token)) % config_.vocab_buckets;
}

void MockBackend::refresh_row(std::size_t row) {
  const double* w = &weights_[row * config_.vocab_buckets];
  const double mx = *std::max_element(w, w + config_.vocab_buckets);
  double sum = 0.0;
  for (std::size_t j = 0; j < config_.vocab_buckets; ++j) sum += std::exp(w[j] - mx);
  row_lse_[row] = mx + std::log(sum);
}

std::vector<double> MockBackend::score(std::string_view prompt, std::string_view target) const {
  const auto tokens = tokenize(target);
  std::vector<double> out;
  out.reserve(tokens.size());
  if (config_.fixed_token_prob) {
    out.assign(tokens.size(), std::log(*config_.fixed_token_prob));
    return out;
  }
  const auto prompt_tokens = tokenize(prompt);
  std::string prev = prompt_tokens.empty() ? std::string(kBos) : prompt_tokens.back();
  for (const auto& tok : tokens) {
    const std::size_t r = row_of(prev);
    out.push_back(weights_[r * config_.vocab_buckets + col_of(tok)] - row_lse_[r]);
    prev = tok;
  }
  return out;
}

const std::vector<std::string>& MockBackend::candidates_for(std::string_view prompt) const {
  static const std::vector<std::string> kNone;
  if (!config_.script) return kNone;
  const auto* c = config_.script->lookup(prompt);
  return c ? *c : kNone;
}

std::vector<double> MockBackend::candidate_distribution(std::string_view prompt,
                                                        const Decoding& decoding) const {
  const auto& cands = candidates_for(prompt);
  std::vector<double> probs(cands.size(), 0.0);
  if (cands.empty()) return probs;

  std::vector<double> logits(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const auto lp = score(prompt, cands[i]);
    const double mean =
        lp.empty() ? -1e9 : std::accumulate(lp.begin(), lp.end(), 0.0) / static_cast<double>(lp.size());
    logits[i] = config_.sharpness * mean;
  }
  if (decoding.temperature <= 0.0) {
    probs[static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin())] = 1.0;
    return probs;
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp((logits[i] - mx) / decoding.temperature);
    z += probs[i];
  }
  for (auto& p : probs) p /= z;

  if (decoding.top_p < 1.0) {
    std::vector<std::size_t> order(probs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
    double cum = 0.0;
    std::vector<double> kept(probs.size(), 0.0);
    for (auto i : order) {
      kept[i] = probs[i];
      cum += probs[i];
      if (cum >= decoding.top_p) break;
    }
    for (auto& p : kept) p /= cum;
    probs = std::move(kept);
  }
  return probs;
}

std::vector<std::string> MockBackend::sample(std::string_view prompt, const Decoding& decoding,
                                             std::size_t count) const {
  const auto& cands = candidates_for(prompt);
  if (cands.empty()) return std::vector<std::string>(count);
  const auto probs = candidate_distribution(prompt, decoding);
  std::mt19937_64 rng(text::derive_seed(config_.seed, decoding.seed, text::fnv1a(prompt)));
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const double u = unit(rng);
    double cum = 0.0;
    std::size_t pick = cands.size() - 1;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      cum += probs[i];
      if (u < cum) {
        pick = i;
        break;
      }
    }
    while (probs[pick] == 0.0 && pick > 0) --pick;
    out.push_back(cands[pick]);
  }
  return out;
}

void MockBackend::train_step(std::span<const WeightedSequence> batch, const StepOptions& options) {
  if (config_.fixed_token_prob) return;

  // Identical sequences are merged first so that opposite coefficients on
  // the same text cancel exactly.
  std::map<std::pair<std::string, std::string>, double> merged;
  for (const auto& s : batch) merged[{s.prompt, s.target}] += s.coefficient;

  const std::size_t V = config_.vocab_buckets;
  std::map<std::size_t, std::vector<double>> grad;  // row -> dL/dW[row]
  for (const auto& [key, coef] : merged) {
    if (coef == 0.0) continue;
    const auto prompt_tokens = tokenize(key.first);
    std::string prev = prompt_tokens.empty() ? std::string(kBos) : prompt_tokens.back();
    for (const auto& tok : tokenize(key.second)) {
      const std::size_t r = row_of(prev);
      auto& g = grad[r];
      if (g.empty()) g.assign(V, 0.0);
      const double* w = &weights_[r * V];
      // d log pi / dW[r][j] = [j == col] - softmax_j
      for (std::size_t j = 0; j < V; ++j) g[j] -= coef * std::exp(w[j] - row_lse_[r]);
      g[col_of(tok)] += coef;
      prev = tok;
    }
  }

  double norm2 = 0.0;
  for (const auto& [r, g] : grad)
    for (double v : g) norm2 += v * v;
  double scale = options.learning_rate;
  if (options.grad_clip > 0.0 && norm2 > options.grad_clip * options.grad_clip) {
    scale *= options.grad_clip / std::sqrt(norm2);
  }
  // Descent on L: W -= lr * dL/dW, where dL/dW = sum coef * d log pi / dW.
  for (const auto& [r, g] : grad) {
    double* w = &weights_[r * V];
    for (std::size_t j = 0; j < V; ++j) w[j] -= scale * g[j];
    refresh_row(r);
  }
}

PolicyCheckpoint MockBackend::snapshot() const {
  PolicyCheckpoint ck;
  std::uint64_t dims[2] = {config_.context_buckets, config_.vocab_buckets};
  ck.payload.resize(sizeof(dims) + weights_.size() * sizeof(double));
  std::memcpy(ck.payload.data(), dims, sizeof(dims));
  std::memcpy(ck.payload.data() + sizeof(dims), weights_.data(), weights_.size() * sizeof(double));
  ck.provenance = Provenance{config_.model_id, 0, Stage::kBase};
  return ck;
}

void MockBackend::restore(const PolicyCheckpoint& ck) {
  std::uint64_t dims[2] = {0, 0};
  if (ck.payload.size() < sizeof(dims)) throw Error(ErrorCode::kBackend, "checkpoint too small");
  std::memcpy(dims, ck.payload.data(), sizeof(dims));
  if (dims[0] != config_.context_buckets || dims[1] != config_.vocab_buckets ||
      ck.payload.size() != sizeof(dims) + weights_.size() * sizeof(double)) {
    throw Error(ErrorCode::kBackend, "checkpoint shape does not match this mock backend");
  }
  std::memcpy(weights_.data(), ck.payload.data() + sizeof(dims), weights_.size() * sizeof(double));
  for (std::size_t r = 0; r < config_.context_buckets; ++r) refresh_row(r);
}

BackendFactory mock_factory(MockBackendConfig config) {
  return [config = std::move(config)]() -> std::unique_ptr<GenerativeBackend> {
    return std::make_unique<MockBackend>(config);
  };
}

}  // namespace ens::model
