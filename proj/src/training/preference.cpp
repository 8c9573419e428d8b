#include "ens/training/preference.hpp"

#include <algorithm>
#include <thread>

#include "ens/core/error.hpp"
#include "ens/core/text.hpp"
#include "ens/model/similarity.hpp"

namespace ens::training {

using nlohmann::json;

std::vector<PreferencePair> select_preference_pairs(const std::string& context_id,
                                                    const std::string& prompt,
                                                    const std::vector<ScoredCompletion>& samples,
                                                    double tau1, double tau2,
                                                    std::size_t max_pairs) {
  std::vector<const ScoredCompletion*> good, bad;
  for (const auto& s : samples) {
    if (!s.similarity || *s.similarity < tau2) {
      bad.push_back(&s);
    } else if (*s.similarity > tau1) {
      good.push_back(&s);
    }
  }
  std::vector<PreferencePair> out;
  for (const auto* g : good) {
    for (const auto* b : bad) {
      if (max_pairs != 0 && out.size() == max_pairs) return out;
      out.push_back({context_id, prompt, g->text, b->text, *g->similarity, b->similarity});
    }
  }
  return out;
}

std::vector<std::vector<ScoredCompletion>> sample_and_score(
    const model::GenerativeBackend& policy, const model::Embedder& embedder,
    const std::vector<UnlabeledRecord>& corpus, const TrainingConfig& config, std::size_t count,
    std::uint64_t round_seed) {
  std::vector<std::vector<ScoredCompletion>> out(corpus.size());
  auto work = [&](std::size_t i) {
    const auto& rec = corpus[i];
    model::Decoding dec;
    dec.temperature = config.sample_temperature;
    dec.top_p = config.sample_top_p;
    dec.seed = text::derive_seed(round_seed, text::fnv1a(rec.id));
    const auto prompt = render_prompt(rec.context);
    for (auto& completion : policy.sample(prompt, dec, count)) {
      std::optional<double> sim;
      try {
        sim = model::response_similarity(completion, rec.response, embedder, config.mask);
      } catch (const Error& e) {
        // An answer with no embeddable tokens carries no similarity signal.
        if (e.code() != ErrorCode::kZeroVector) throw;
        sim = 0.0;
      }
      out[i].push_back({std::move(completion), sim});
    }
  };

  const std::size_t threads = std::min(config.parallelism, corpus.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < corpus.size(); ++i) work(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < corpus.size(); i += threads) work(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<PreferencePair> build_preference_set(const model::GenerativeBackend& policy,
                                                 const model::Embedder& embedder,
                                                 const std::vector<UnlabeledRecord>& corpus,
                                                 const TrainingConfig& config,
                                                 std::uint64_t round_seed) {
  if (config.k < 2) throw Error(ErrorCode::kConfig, "preference sampling needs k >= 2");
  const auto scored = sample_and_score(policy, embedder, corpus, config, config.k, round_seed);
  std::vector<PreferencePair> out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto pairs = select_preference_pairs(corpus[i].id, render_prompt(corpus[i].context), scored[i],
                                         config.tau1, config.tau2, config.max_pairs_per_context);
    out.insert(out.end(), std::make_move_iterator(pairs.begin()),
               std::make_move_iterator(pairs.end()));
  }
  return out;
}

json to_json(const PreferencePair& p) {
  json j;
  j["context_id"] = p.context_id;
  j["prompt"] = p.prompt;
  j["preferred"] = p.preferred;
  j["rejected"] = p.rejected;
  j["preferred_similarity"] = p.preferred_similarity;
  j["rejected_similarity"] = p.rejected_similarity ? json(*p.rejected_similarity) : json(nullptr);
  return j;
}

PreferencePair preference_pair_from_json(const json& j) {
  try {
    PreferencePair p;
    p.context_id = j.at("context_id").get<std::string>();
    p.prompt = j.at("prompt").get<std::string>();
    p.preferred = j.at("preferred").get<std::string>();
    p.rejected = j.at("rejected").get<std::string>();
    p.preferred_similarity = j.at("preferred_similarity").get<double>();
    if (!j.at("rejected_similarity").is_null()) {
      p.rejected_similarity = j.at("rejected_similarity").get<double>();
    }
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("bad preference pair: ") + e.what());
  }
}

}  // namespace ens::training
