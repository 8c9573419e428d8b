#include "ens/training/config.hpp"

#include <sstream>

#include "ens/core/error.hpp"
#include "ens/core/jsonl.hpp"
#include "ens/core/text.hpp"

namespace ens {

KeyValueConfig KeyValueConfig::parse(const std::string& content, const std::string& origin) {
  KeyValueConfig kv;
  std::istringstream in(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto t = text::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfig,
                  origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = text::trim(t.substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorCode::kConfig, origin + ":" + std::to_string(lineno) + ": empty key");
    }
    kv.values_[std::string(key)] = std::string(text::trim(t.substr(eq + 1)));
  }
  return kv;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  return parse(io::read_file(path), path);
}

void KeyValueConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || text::trim(assignment.substr(0, eq)).empty()) {
    throw Error(ErrorCode::kConfig, "override \"" + assignment + "\" is not key=value");
  }
  values_[std::string(text::trim(assignment.substr(0, eq)))] =
      std::string(text::trim(assignment.substr(eq + 1)));
}

void KeyValueConfig::merge(const KeyValueConfig& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::require(const std::string& key) const {
  auto v = get(key);
  if (!v) throw Error(ErrorCode::kConfig, "missing config key " + key);
  return *v;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    double d = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kConfig, "config key " + key + ": \"" + *v + "\" is not a number");
  }
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    long long n = std::stoll(*v, &used);
    if (used != v->size()) throw std::invalid_argument("trailing characters");
    return n;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kConfig, "config key " + key + ": \"" + *v + "\" is not an integer");
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  const auto s = text::to_lower(*v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw Error(ErrorCode::kConfig, "config key " + key + ": \"" + *v + "\" is not a boolean");
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

std::string KeyValueConfig::dump() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace ens

namespace ens::training {

void TrainingConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kConfig, what); };
  if (!(0.0 <= tau2 && tau2 < tau1 && tau1 <= 1.0)) bad("thresholds must satisfy 0 <= tau2 < tau1 <= 1");
  if (!(0.0 <= tau3 && tau3 <= 1.0)) bad("tau3 must lie in [0, 1]");
  if (!(beta > 0.0)) bad("dpo.beta must be > 0");
  if (k < 2) bad("sampling.k must be >= 2");
  if (m < 1) bad("sampling.m must be >= 1");
  if (sample_temperature < 0.0) bad("sampling.temperature must be >= 0");
  if (!(sample_top_p > 0.0 && sample_top_p <= 1.0)) bad("sampling.top_p must lie in (0, 1]");
  if (iteration_limit < 0) bad("loop.iteration_limit must be >= 0");
  if (convergence_fraction < 0.0) bad("loop.convergence_fraction must be >= 0");
  if (sft_epochs < 1 || dpo_epochs < 1) bad("epochs must be >= 1");
  if (sft_batch_size < 1 || dpo_batch_size < 1) bad("batch sizes must be >= 1");
  if (!(sft_learning_rate > 0.0) || !(dpo_learning_rate > 0.0)) bad("learning rates must be > 0");
  if (!(warmup_ratio >= 0.0 && warmup_ratio < 1.0)) bad("warmup ratio must lie in [0, 1)");
  if (!mask.includes(Component::kResponse)) bad("ablation mask must include RG");
  if (parallelism < 1) bad("parallelism must be >= 1");
  if (generation_retry_limit < 0) bad("generation.retry_limit must be >= 0");
}

const std::vector<std::string>& required_config_keys() {
  static const std::vector<std::string> keys = {
      "thresholds.tau1",      "thresholds.tau2",          "thresholds.tau3",
      "dpo.beta",             "sampling.k",               "sampling.m",
      "sampling.temperature", "loop.iteration_limit",     "loop.convergence_fraction",
      "seed",
  };
  return keys;
}

namespace {

AblationMask parse_mask_value(const std::string& v) {
  const auto t = std::string(text::trim(v));
  if (!t.empty() && std::isdigit(static_cast<unsigned char>(t[0]))) {
    auto m = AblationMask::setting(std::stoi(t));
    if (!m) throw Error(ErrorCode::kConfig, "ablation.mask: unknown setting " + t);
    return *m;
  }
  auto m = AblationMask::parse(t);
  if (!m) throw Error(ErrorCode::kConfig, "ablation.mask: cannot parse \"" + t + "\"");
  return *m;
}

}  // namespace

TrainingConfig training_config_from(const KeyValueConfig& kv, bool require_all) {
  if (require_all) {
    for (const auto& key : required_config_keys()) kv.require(key);
  }
  TrainingConfig c;
  c.tau1 = kv.get_double("thresholds.tau1", c.tau1);
  c.tau2 = kv.get_double("thresholds.tau2", c.tau2);
  c.tau3 = kv.get_double("thresholds.tau3", c.tau3);
  c.beta = kv.get_double("dpo.beta", c.beta);
  auto count = [&](const char* key, std::size_t fallback) {
    const auto v = kv.get_int(key, static_cast<long long>(fallback));
    if (v < 0) throw Error(ErrorCode::kConfig, std::string(key) + " must be >= 0");
    return static_cast<std::size_t>(v);
  };
  c.k = count("sampling.k", c.k);
  c.m = count("sampling.m", c.m);
  c.sample_temperature = kv.get_double("sampling.temperature", c.sample_temperature);
  c.sample_top_p = kv.get_double("sampling.top_p", c.sample_top_p);
  c.iteration_limit = static_cast<int>(kv.get_int("loop.iteration_limit", c.iteration_limit));
  c.convergence_fraction = kv.get_double("loop.convergence_fraction", c.convergence_fraction);
  c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long long>(c.seed)));
  c.max_pairs_per_context = count("preference.max_pairs_per_context", c.max_pairs_per_context);
  const auto mode = kv.get_string("dpo.score_mode", "full");
  if (mode == "full") {
    c.dpo_score_mode = DpoScoreMode::kFullTarget;
  } else if (mode == "rationale") {
    c.dpo_score_mode = DpoScoreMode::kRationaleOnly;
  } else {
    throw Error(ErrorCode::kConfig, "dpo.score_mode must be full or rationale");
  }
  c.accumulate_pseudo_labels = kv.get_bool("loop.accumulate_pseudo_labels", c.accumulate_pseudo_labels);
  if (auto m = kv.get("ablation.mask")) c.mask = parse_mask_value(*m);
  c.sft_epochs = static_cast<int>(kv.get_int("sft.epochs", c.sft_epochs));
  c.sft_batch_size = count("sft.batch_size", c.sft_batch_size);
  c.sft_learning_rate = kv.get_double("sft.learning_rate", c.sft_learning_rate);
  c.dpo_epochs = static_cast<int>(kv.get_int("dpo.epochs", c.dpo_epochs));
  c.dpo_batch_size = count("dpo.batch_size", c.dpo_batch_size);
  c.dpo_learning_rate = kv.get_double("dpo.learning_rate", c.dpo_learning_rate);
  c.grad_clip = kv.get_double("optimizer.grad_clip", c.grad_clip);
  c.warmup_ratio = kv.get_double("optimizer.warmup_ratio", c.warmup_ratio);
  c.descent_guard = kv.get_bool("train.descent_guard", c.descent_guard);
  c.optimizer = kv.get_string("optimizer.name", c.optimizer);
  c.optimizer_learning_rate = kv.get_double("optimizer.learning_rate", c.optimizer_learning_rate);
  c.weight_decay = kv.get_double("optimizer.weight_decay", c.weight_decay);
  c.lr_schedule = kv.get_string("optimizer.schedule", c.lr_schedule);
  c.parallelism = count("parallelism", c.parallelism);
  c.generation_retry_limit =
      static_cast<int>(kv.get_int("generation.retry_limit", c.generation_retry_limit));
  c.validate();
  return c;
}

KeyValueConfig to_key_values(const TrainingConfig& c) {
  KeyValueConfig kv;
  auto num = [](double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
  };
  kv.set("thresholds.tau1", num(c.tau1));
  kv.set("thresholds.tau2", num(c.tau2));
  kv.set("thresholds.tau3", num(c.tau3));
  kv.set("dpo.beta", num(c.beta));
  kv.set("sampling.k", std::to_string(c.k));
  kv.set("sampling.m", std::to_string(c.m));
  kv.set("sampling.temperature", num(c.sample_temperature));
  kv.set("sampling.top_p", num(c.sample_top_p));
  kv.set("loop.iteration_limit", std::to_string(c.iteration_limit));
  kv.set("loop.convergence_fraction", num(c.convergence_fraction));
  kv.set("loop.accumulate_pseudo_labels", c.accumulate_pseudo_labels ? "true" : "false");
  kv.set("seed", std::to_string(c.seed));
  kv.set("preference.max_pairs_per_context", std::to_string(c.max_pairs_per_context));
  kv.set("dpo.score_mode", c.dpo_score_mode == DpoScoreMode::kFullTarget ? "full" : "rationale");
  kv.set("ablation.mask", c.mask.to_string());
  kv.set("sft.epochs", std::to_string(c.sft_epochs));
  kv.set("sft.batch_size", std::to_string(c.sft_batch_size));
  kv.set("sft.learning_rate", num(c.sft_learning_rate));
  kv.set("dpo.epochs", std::to_string(c.dpo_epochs));
  kv.set("dpo.batch_size", std::to_string(c.dpo_batch_size));
  kv.set("dpo.learning_rate", num(c.dpo_learning_rate));
  kv.set("optimizer.grad_clip", num(c.grad_clip));
  kv.set("optimizer.warmup_ratio", num(c.warmup_ratio));
  kv.set("optimizer.name", c.optimizer);
  kv.set("optimizer.learning_rate", num(c.optimizer_learning_rate));
  kv.set("optimizer.weight_decay", num(c.weight_decay));
  kv.set("optimizer.schedule", c.lr_schedule);
  kv.set("train.descent_guard", c.descent_guard ? "true" : "false");
  kv.set("parallelism", std::to_string(c.parallelism));
  kv.set("generation.retry_limit", std::to_string(c.generation_retry_limit));
  return kv;
}

}  // namespace ens::training
