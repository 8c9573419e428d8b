// Acceptance checks: one PASS/FAIL line per criterion, with its runtime.

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "ens/core/tagged.hpp"
#include "ens/corpus/quality.hpp"
#include "ens/corpus/split.hpp"
#include "ens/eval/metrics.hpp"
#include "ens/eval/report.hpp"
#include "ens/eval/stats.hpp"
#include "ens/eval/sweep.hpp"
#include "ens/model/checkpoint.hpp"
#include "ens/model/embedder.hpp"
#include "ens/service/server.hpp"
#include "ens/service/session_store.hpp"
#include "ens/training/loop.hpp"
#include "ens/training/losses.hpp"
#include "ens/training/preference.hpp"
#include "ens/training/pseudo_label.hpp"
#include "fixtures.hpp"

using namespace ens;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail << what;
    } else if (!cond) {
      detail << "; " << what;
    }
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s.precision(12);
    s << what << ": got " << got << ", want " << want << " +- " << tol;
    expect(std::isfinite(got) && std::abs(got - want) <= tol, s.str());
  }
};

// -log sigmoid(x), evaluated directly.
double neg_log_sigmoid(double x) { return -std::log(1.0 / (1.0 + std::exp(-x))); }

// Two-sided p of Student's t with 4 degrees of freedom (closed-form CDF).
double t4_two_sided(double t) {
  const double a = std::abs(t);
  const double u = 1.0 + a * a / 4.0;
  const double cdf = 0.5 + 0.375 * (a / std::sqrt(u)) * (1.0 - a * a / (12.0 * u));
  return 2.0 * (1.0 - cdf);
}

const std::vector<std::string> kWords = {"offer",  "salary", "budget", "schedule", "share",   "plan",
                                         "calm",   "fair",   "clear",  "progress", "concern", "terms",
                                         "team",   "week",   "option", "deal",     "water",   "hours"};

std::string random_text(std::mt19937_64& rng, int min_words, int max_words) {
  std::uniform_int_distribution<int> len(min_words, max_words);
  std::uniform_int_distribution<std::size_t> pick(0, kWords.size() - 1);
  std::string out;
  for (int i = 0, n = len(rng); i < n; ++i) {
    if (i) out += ' ';
    out += kWords[pick(rng)];
  }
  return out;
}

EnsCotRationale random_rationale(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> emo(0, static_cast<int>(kEmotionCount) - 1);
  std::uniform_int_distribution<int> strat(0, static_cast<int>(kStrategyCount) - 1);
  EnsCotRationale r;
  r.emotion = static_cast<Emotion>(emo(rng));
  r.trigger = random_text(rng, 2, 8) + ".";
  r.assessment = random_text(rng, 2, 8) + ".";
  r.perspective_shift = random_text(rng, 3, 10) + ".";
  r.mindset_transformation = random_text(rng, 3, 10) + ".";
  r.strategy = static_cast<Strategy>(strat(rng));
  r.strategy_reason = random_text(rng, 1, 5) + std::string(kStrategyReasonMarker) + " " + random_text(rng, 1, 4) + ".";
  r.response = random_text(rng, 3, 12) + ".";
  return r;
}

// Mutations that each break the tagged grammar.
std::string mutate(const std::string& text, int kind, std::mt19937_64& rng) {
  auto replace_first = [&](std::string s, const std::string& from, const std::string& to) {
    const auto p = s.find(from);
    if (p != std::string::npos) s.replace(p, from.size(), to);
    return s;
  };
  switch (kind % 10) {
    case 0: return replace_first(text, "<R>", "");
    case 1: return replace_first(text, "</A>", "");
    case 2: return replace_first(text, "The user thinks", "<A> The user thinks");
    case 3: return replace_first(text, "The user feels ", "The user feels xyzzy ");
    case 4: return replace_first(text, "The agent chooses", "");
    case 5: {
      const auto open = text.find("<A>");
      return text.substr(0, open) + "<A> </A>";
    }
    case 6: {
      const auto a = text.find("<A>");
      return text.substr(a) + " " + text.substr(0, a);
    }
    case 7: {
      std::uniform_int_distribution<std::size_t> cut(0, text.size() - 5);
      return text.substr(0, cut(rng));
    }
    case 8: return replace_first(text, "The agent chooses ", "The agent chooses bribery ");
    default: return replace_first(text, std::string(kStrategyReasonMarker), " so");
  }
}

bool check_dpo(Check& c) {
  const auto labeled = testing::sample_labeled(6);
  const auto unlabeled = testing::sample_unlabeled(4, 2);
  auto factory = testing::desk_factory(labeled, unlabeled);
  auto policy = factory();
  auto reference = factory();
  // Preference pairs over the scripted candidates of each context.
  const model::MockBackend& mb = dynamic_cast<const model::MockBackend&>(*policy);
  std::vector<training::PreferencePair> pairs;
  for (const auto& u : unlabeled) {
    const auto prompt = training::render_prompt(u.context);
    const auto cands = mb.sample(prompt, {1.0, 1.0, 3}, 4);
    pairs.push_back({u.id, prompt, cands[0], cands[1], 0.9, 0.1});
  }
  for (auto mode : {training::DpoScoreMode::kFullTarget, training::DpoScoreMode::kRationaleOnly}) {
    c.near(training::dpo_loss(*policy, *reference, pairs, 0.1, mode), std::log(2.0), 1e-9, "policy == reference");
  }
  for (double beta : {0.05, 0.1, 0.5}) {
    c.near(training::dpo_loss(*policy, *reference, std::span(pairs).subspan(0, 1), beta), std::log(2.0), 1e-9,
           "single pair at beta " + std::to_string(beta));
  }
  c.near(training::dpo_pair_loss(4.0, 0.1), neg_log_sigmoid(0.4), 1e-12, "gap +4 vs direct softplus");
  c.near(training::dpo_pair_loss(4.0, 0.1), 0.513015, 1e-6, "gap +4 literal");
  return c.ok;
}

bool check_sft(Check& c) {
  model::MockBackendConfig cfg;
  cfg.fixed_token_prob = 0.5;
  model::MockBackend backend(cfg);
  const std::vector<training::TrainingExample> batch{{"User: hello", "alpha beta gamma"}};
  c.expect(backend.tokenize(batch[0].target).size() == 3, "target should have 3 tokens");
  double sum = 0.0;
  for (double lp : backend.score(batch[0].prompt, batch[0].target)) sum -= lp;
  const double loss = training::sft_loss(backend, batch);
  c.near(loss, 3.0 * std::log(2.0), 1e-9, "3 ln 2");
  c.near(loss, sum, 1e-12, "token-by-token sum");
  return c.ok;
}

bool check_preferences(Check& c) {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200 && c.ok; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 7);
    std::vector<training::ScoredCompletion> samples;
    for (int i = 0; i < k; ++i) {
      std::optional<double> sim;
      if (unit(rng) > 0.15) sim = unit(rng);
      samples.push_back({"s" + std::to_string(i), sim});
    }
    const double tau1 = 0.6 + 0.35 * unit(rng);
    const double tau2 = 0.1 + (tau1 - 0.1) * unit(rng);
    const std::size_t cap = rng() % 7;
    std::vector<std::pair<std::string, std::string>> expected;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        const bool good = samples[i].similarity && *samples[i].similarity > tau1;
        const bool bad = !samples[j].similarity || *samples[j].similarity < tau2;
        if (good && bad) expected.emplace_back(samples[i].text, samples[j].text);
      }
    }
    if (cap != 0 && expected.size() > cap) expected.resize(cap);
    const auto got = training::select_preference_pairs("c", "p", samples, tau1, tau2, cap);
    std::vector<std::pair<std::string, std::string>> got_ids;
    for (const auto& p : got) {
      got_ids.emplace_back(p.preferred, p.rejected);
      for (const auto* s : {&p.preferred_similarity}) {
        c.expect(!(*s >= tau2 && *s <= tau1), "preferred similarity inside [tau2, tau1]");
      }
      if (p.rejected_similarity) {
        c.expect(!(*p.rejected_similarity >= tau2 && *p.rejected_similarity <= tau1),
                 "rejected similarity inside [tau2, tau1]");
      }
    }
    c.expect(got_ids == expected, "trial " + std::to_string(trial) + " differs from enumeration");
    // Lowering tau1 never shrinks the preferred set.
    auto preferred = [&](double t1) {
      std::set<std::string> s;
      for (const auto& p : training::select_preference_pairs("c", "p", samples, t1, std::min(tau2, t1), 0)) {
        s.insert(p.preferred);
      }
      return s;
    };
    const auto hi = preferred(tau1);
    const auto lo = preferred(tau1 - 0.1 * unit(rng) - 0.01);
    c.expect(std::includes(lo.begin(), lo.end(), hi.begin(), hi.end()), "lower tau1 shrank preferred set");
  }
  return c.ok;
}

bool check_pseudo_labels(Check& c) {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const AblationMask mask = AblationMask::full();
  for (int trial = 0; trial < 200 && c.ok; ++trial) {
    // Pool: three rationales, the first one twice with different answers,
    // plus an unparseable line.
    std::vector<std::string> pool;
    std::vector<EnsCotRationale> pool_rationales;
    for (int i = 0; i < 3; ++i) {
      auto r = random_rationale(rng);
      r.emotion = static_cast<Emotion>(i);  // keeps keys distinct
      pool_rationales.push_back(r);
      pool.push_back(render_tagged_target(r, r.response, mask).text);
    }
    auto twin = pool_rationales[0];
    twin.response = "a different answer.";
    pool.push_back(render_tagged_target(twin, twin.response, mask).text);
    pool.push_back("<R> The user feels ??? </A> garbage");

    const std::size_t m = 1 + rng() % 5;
    const std::size_t n_records = 1 + rng() % 4;
    const double tau3 = 0.3 + 0.6 * unit(rng);
    std::size_t total = 0;
    for (std::size_t u = 0; u < n_records; ++u) {
      training::UnlabeledRecord rec{"u" + std::to_string(u), {Turn{Speaker::kUser, "hi", std::nullopt, std::nullopt}},
                                    "ground truth answer."};
      std::vector<training::ScoredCompletion> samples;
      for (std::size_t i = 0; i < m; ++i) samples.push_back({pool[rng() % pool.size()], unit(rng)});
      // Brute force.
      std::vector<std::pair<EnsCotRationale, double>> expected;
      std::vector<EnsCotRationale> seen;
      for (const auto& s : samples) {
        auto parsed = parse_tagged_target(s.text, mask);
        if (!parsed || !(*s.similarity > tau3)) continue;
        auto key = parsed.value().rationale;
        key.response.clear();
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(key);
        auto r = parsed.value().rationale;
        r.response = rec.response;
        expected.emplace_back(r, *s.similarity);
      }
      const auto got = training::select_pseudo_labels(rec, samples, tau3, mask);
      c.expect(got.size() == expected.size(), "trial " + std::to_string(trial) + " size differs");
      for (std::size_t i = 0; i < std::min(got.size(), expected.size()); ++i) {
        c.expect(got[i].rationale == expected[i].first && got[i].similarity == expected[i].second &&
                     got[i].context_id == rec.id,
                 "trial " + std::to_string(trial) + " record differs");
        c.expect(got[i].similarity > tau3, "retained similarity <= tau3");
      }
      total += got.size();
    }
    c.expect(total <= m * n_records, "more than m * |D_U| pseudo-labels");
  }
  return c.ok;
}

bool check_loop(Check& c) {
  const auto labeled = testing::sample_labeled(6);
  const auto unlabeled = testing::sample_unlabeled(4, 2);
  c.expect(labeled.size() == 6 && unlabeled.size() == 4, "fixture sizes");
  auto config = testing::desk_config();
  config.iteration_limit = 3;
  config.convergence_fraction = 0.0;
  model::HashEmbedder embedder;
  testing::TempDir a("loop-a"), b("loop-b");
  training::LoopOptions opts;
  opts.run_id = "desk";
  opts.runs_dir = a.str();
  const auto start = std::chrono::steady_clock::now();
  const auto state = training::run_iterative_loop(testing::desk_factory(labeled, unlabeled), embedder, labeled,
                                                  unlabeled, config, opts);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(secs < 60.0, "run took " + std::to_string(secs) + " s");
  const auto root = a.path() / "desk";
  std::size_t sft_files = 0;
  for (const auto& e : fs::directory_iterator(root / "checkpoints")) {
    if (e.path().filename().string().rfind("sft-", 0) == 0) ++sft_files;
  }
  c.expect(sft_files == 4, "expected 4 sft checkpoints, found " + std::to_string(sft_files));
  for (int i = 0; i <= 3; ++i) c.expect(fs::exists(root / "checkpoints" / ("sft-" + std::to_string(i))), "sft-" + std::to_string(i));
  c.expect(state.iterations.size() == 4, "expected 4 iteration records");
  const auto base = model::load_checkpoint((root / "checkpoints" / "base-0").string());
  c.expect(base.provenance.stage == model::Stage::kBase, "base-0 is not stage=base");
  for (const auto& it : state.iterations) {
    c.expect(it.sft_started_from == "base-0", "iteration " + std::to_string(it.iteration) + " did not start from base-0");
    c.expect(it.sft_start_digest == model::payload_digest(base.payload),
             "iteration " + std::to_string(it.iteration) + " start digest differs from base-0");
    // D_L is contained in D_N.
    const auto merged = io::read_jsonl((root / ("iter-" + std::to_string(it.iteration)) / "merged.jsonl").string());
    std::vector<training::LabeledRecord> dn;
    for (const auto& j : merged) dn.push_back(training::labeled_record_from_json(j));
    for (const auto& l : labeled) {
      c.expect(std::find(dn.begin(), dn.end(), l) != dn.end(), "D_L record " + l.id + " missing from D_N");
    }
  }
  opts.runs_dir = b.str();
  training::run_iterative_loop(testing::desk_factory(labeled, unlabeled), embedder, labeled, unlabeled, config, opts);
  const auto ta = testing::tree_contents(root);
  const auto tb = testing::tree_contents(b.path() / "desk");
  c.expect(!ta.empty() && ta == tb, "rerun artifacts are not byte-identical");
  return c.ok;
}

bool check_parser(Check& c) {
  std::mt19937_64 rng(4242);
  for (int i = 0; i < 100; ++i) {
    const auto r = random_rationale(rng);
    const auto first = render_tagged_target(r, r.response, AblationMask::full()).text;
    const auto parsed = parse_tagged_target(first, AblationMask::full());
    c.expect(parsed.ok(), "valid text failed: " + first);
    if (!parsed) continue;
    c.expect(parsed.value().rationale == r, "parsed rationale differs");
    c.expect(render_tagged_target(parsed.value().rationale, parsed.value().response, AblationMask::full()).text == first,
             "re-render differs");
  }
  for (int i = 0; i < 100; ++i) {
    const auto r = random_rationale(rng);
    const auto text = mutate(render_tagged_target(r, r.response, AblationMask::full()).text, i, rng);
    try {
      const auto parsed = parse_tagged_target(text, AblationMask::full());
      c.expect(!parsed.ok(), "mutation " + std::to_string(i % 10) + " parsed: " + text);
      if (!parsed) c.expect(!parsed.error().message.empty(), "empty failure message");
    } catch (const std::exception& e) {
      c.expect(false, std::string("mutation threw: ") + e.what());
    }
  }
  return c.ok;
}

bool check_metrics(Check& c) {
  const std::vector<std::string> x{"we can offer a higher salary next year", "let us agree on the schedule"};
  c.near(eval::bleu4(x, x), 1.0, 1e-12, "bleu4(x,x)");
  c.near(eval::distinct3({"a b c a b c"}), 0.75, 1e-12, "distinct3");
  model::HashEmbedder embedder;
  c.near(eval::embedding_f1(x, x, embedder), 1.0, 1e-9, "embedding_f1(x,x)");
  c.near(eval::fleiss_kappa({"EA", {{4, 4, 4}, {2, 2, 2}, {5, 5, 5}}}), 1.0, 1e-12, "perfect agreement");
  // 4 items x 3 raters x 2 categories; kappa = (2/3 - 1/2) / (1 - 1/2) = 1/3 by hand.
  c.near(eval::fleiss_kappa({"EA", {{1, 1, 1}, {1, 1, 2}, {2, 2, 2}, {1, 2, 2}}}), 1.0 / 3.0, 1e-9, "hand table");
  const auto w = eval::welch_t_test({1, 2, 3}, {4, 5, 6});
  c.near(w.p, t4_two_sided(-3.0 / std::sqrt(2.0 / 3.0)), 1e-9, "welch p vs closed form");
  c.near(w.p, 0.0214, 1e-3, "welch p literal");
  model::MockBackendConfig cfg;
  cfg.fixed_token_prob = 0.5;
  model::MockBackend backend(cfg);
  const std::vector<eval::PerplexityRecord> recs{{"User: hi", "<R> The user feels joy. </R> <A> sure thing </A>"},
                                                 {"User: hello", "fine by me"}};
  c.near(eval::perplexity(backend, recs), 2.0, 1e-9, "perplexity p=0.5");
  return c.ok;
}

bool check_corpus(Check& c) {
  const auto& corpus = testing::sample_corpus();
  c.expect(corpus.size() == 20, "sample corpus should hold 20 dialogues");
  std::size_t violations = 0;
  for (const auto& d : corpus) violations += validate_dialogue(d).violations.size();
  c.expect(violations == 0, std::to_string(violations) + " violation(s) in the sample corpus");
  // Independent count from the raw documents.
  std::size_t raw_dialogues = 0, raw_turns = 0;
  for (const auto& j : io::read_jsonl(testing::sample_path("dialogues.jsonl"))) {
    ++raw_dialogues;
    raw_turns += j.at("turns").size();
  }
  const auto stats = corpus::corpus_stats("all", corpus);
  c.expect(stats.dialogues == raw_dialogues && stats.utterances == raw_turns, "corpus_stats counts differ");
  c.near(stats.mean_utterances, static_cast<double>(raw_turns) / static_cast<double>(raw_dialogues), 1e-12, "mean");
  const auto sizes = corpus::split_sizes(840, {0.6, 0.2, 0.2});
  c.expect(sizes.train == 504 && sizes.dev == 168 && sizes.test == 168, "840 split is not 504/168/168");
  std::vector<Dialogue> synthetic(840, corpus[0]);
  for (std::size_t i = 0; i < synthetic.size(); ++i) synthetic[i].id = "d" + std::to_string(i);
  const auto splits = corpus::split_corpus(synthetic, {0.6, 0.2, 0.2}, 3);
  c.expect(splits.train.size() == 504 && splits.dev.size() == 168 && splits.test.size() == 168, "split_corpus sizes");
  // Quality filter: sample ratings mark two dialogues with a sub-3 mean.
  const auto ratings = corpus::load_ratings(testing::sample_path("ratings.jsonl"));
  std::set<std::string> low;
  std::map<std::string, std::map<std::string, std::vector<int>>> by;
  for (const auto& r : ratings) {
    for (const auto& [k, v] : r.scores) by[r.dialogue_id][k].push_back(v);
  }
  for (const auto& [id, crit] : by) {
    for (const auto& [k, vs] : crit) {
      double sum = 0;
      for (int v : vs) sum += v;
      if (sum / static_cast<double>(vs.size()) < 3.0) low.insert(id);
    }
  }
  c.expect(!low.empty(), "sample ratings carry no sub-3 mean");
  const auto filtered = corpus::filter_corpus(corpus, ratings, 3.0);
  for (const auto& d : filtered.retained) c.expect(!low.count(d.id), d.id + " kept despite a sub-3 mean");
  c.expect(filtered.retained.size() == corpus.size() - low.size(), "filter dropped a passing dialogue");
  return c.ok;
}

bool check_sweep(Check& c) {
  const auto labeled = testing::sample_labeled(12);
  const auto unlabeled = testing::sample_unlabeled(6, 4);
  eval::PipelineInputs in;
  in.labeled = labeled;
  in.unlabeled = unlabeled;
  in.test = testing::sample_labeled(6, 8);
  in.factory = testing::desk_factory(labeled, unlabeled);
  model::HashEmbedder embedder;
  in.embedder = &embedder;
  auto base = testing::desk_config();
  base.iteration_limit = 2;
  const auto rows = eval::threshold_sensitivity_sweep(eval::make_pipeline_runner(in), base, eval::default_grid());
  const auto csv = eval::sweep_csv(rows);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  c.expect(line == "tau1,tau2,tau3,ppl,b4,d3,bsf1,rlen,ea,ensc", "header: " + line);
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++n;
    std::istringstream cells(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(cells, cell, ',')) {
      ++cols;
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      c.expect(end && *end == '\0' && std::isfinite(v), "non-finite cell \"" + cell + "\" in " + line);
    }
    c.expect(cols == 10, "row has " + std::to_string(cols) + " columns");
  }
  c.expect(n == 9, "expected 9 rows, got " + std::to_string(n));
  for (const auto& r : rows) c.expect(r.error.empty(), "row error: " + r.error);
  return c.ok;
}

bool check_ablation(Check& c) {
  const auto labeled = testing::sample_labeled(6);
  const auto unlabeled = testing::sample_unlabeled(4, 2);
  const auto test = testing::sample_labeled(6, 6);
  model::HashEmbedder embedder;
  for (int id = 0; id < kAblationSettingCount; ++id) {
    auto config = testing::desk_config();
    config.iteration_limit = 1;
    config.mask = *AblationMask::setting(id);
    try {
      const auto state = training::run_iterative_loop(testing::desk_factory(labeled, unlabeled, config.mask), embedder,
                                                      labeled, unlabeled, config, {});
      auto policy = testing::desk_factory(labeled, unlabeled, config.mask)();
      policy->restore(*state.final_policy);
      eval::EvalOptions opts;
      opts.mask = config.mask;
      const auto report = eval::evaluate_policy(*policy, embedder, test, opts);
      c.expect(report.samples == test.size(), "mask " + std::to_string(id) + " evaluated no samples");
    } catch (const std::exception& e) {
      c.expect(false, "mask " + std::to_string(id) + ": " + e.what());
    }
  }
  const auto m3 = *AblationMask::setting(3);
  for (const auto& ex : training::training_examples(labeled, m3)) {
    c.expect(ex.target.find(lead_in(Component::kStrategy)) == std::string::npos &&
                 ex.target.find(kStrategyReasonMarker) == std::string::npos,
             "mask 3 target carries SS/SR: " + ex.target);
  }
  // Mask 0 against unmasked operation: identical targets and run artifacts.
  const auto m0 = *AblationMask::setting(0);
  const auto t0 = training::training_examples(labeled, m0);
  const auto tf = training::training_examples(labeled, AblationMask::full());
  c.expect(t0.size() == tf.size(), "mask 0 target count");
  for (std::size_t i = 0; i < std::min(t0.size(), tf.size()); ++i) {
    c.expect(t0[i].target == tf[i].target && t0[i].prompt == tf[i].prompt, "mask 0 target differs");
  }
  testing::TempDir a("mask0"), b("full");
  auto cfg0 = testing::desk_config();
  cfg0.iteration_limit = 1;
  cfg0.mask = m0;
  auto cfgf = cfg0;
  cfgf.mask = AblationMask::full();
  training::LoopOptions oa{"r", a.str(), {}}, ob{"r", b.str(), {}};
  training::run_iterative_loop(testing::desk_factory(labeled, unlabeled, m0), embedder, labeled, unlabeled, cfg0, oa);
  training::run_iterative_loop(testing::desk_factory(labeled, unlabeled), embedder, labeled, unlabeled, cfgf, ob);
  c.expect(testing::tree_contents(a.path()) == testing::tree_contents(b.path()), "mask 0 artifacts differ from unmasked");
  return c.ok;
}

bool check_service(Check& c) {
  testing::TempDir dir("service");
  const auto labeled = testing::sample_labeled(12);
  training::AgentOptions agent;
  agent.decoding = {0.7, 1.0, 11};
  service::SessionStore store(dir.str(), agent);
  store.add_policy("mock", std::shared_ptr<const model::GenerativeBackend>(testing::desk_factory(labeled, {})()));
  store.add_scenario({"scn-1", testing::sample_corpus()[0].scenario, "job_interview", "seeded"});
  service::NegotiationServer server(store);
  const int port = server.bind_any_port();
  c.expect(port > 0, "bind failed");
  std::thread serving([&] { server.serve(); });
  while (!server.running()) std::this_thread::sleep_for(std::chrono::milliseconds(5));

  httplib::Client http("127.0.0.1", port);
  auto post = [&](const std::string& path, const json& body) {
    return http.Post(path, body.dump(), "application/json");
  };
  auto created = post("/sessions", {{"scenario_id", "scn-1"}, {"policy_id", "mock"}});
  c.expect(created && created->status == 200, "create session");
  const auto sid = json::parse(created->body).at("session_id").get<std::string>();
  c.expect(post("/sessions", {{"scenario_id", "scn-1"}, {"policy_id", "nope"}})->status == 404, "unknown policy");

  const std::vector<std::string> user{"I expected a higher salary for this role.",
                                      "The company car matters to me as well.",
                                      "Could we settle the schedule this week?"};
  for (const auto& u : user) {
    auto res = post("/sessions/" + sid + "/turns", {{"utterance", u}});
    c.expect(res && res->status == 200, "turn status " + (res ? std::to_string(res->status) : std::string("none")));
    if (!res || res->status != 200) continue;
    const auto body = json::parse(res->body);
    const auto& r = body.at("rationale");
    for (const auto* key : {"EM", "ET", "IA", "PS", "MT", "SS", "SR", "RG"}) {
      c.expect(r.contains(key) && r.at(key).is_string() && !r.at(key).get<std::string>().empty(),
               std::string("rationale lacks ") + key);
    }
    c.expect(body.at("strategy") == r.at("SS"), "strategy field differs from SS");
    c.expect(body.at("response") == r.at("RG"), "response differs from RG");
  }
  const auto session = json::parse(http.Get("/sessions/" + sid)->body);
  const auto& turns = session.at("transcript").at("turns");
  c.expect(turns.size() == 6, "transcript should hold 6 turns");
  for (std::size_t i = 0; i < turns.size(); ++i) {
    c.expect(turns[i].at("speaker") == (i % 2 == 0 ? "user" : "agent"), "alternation broken at turn " + std::to_string(i));
  }
  c.expect(post("/sessions/" + sid + "/ratings", {{"rater_id", "a"}, {"scores", json::object()}})->status == 409,
           "rating an open session");
  c.expect(post("/sessions/" + sid + "/close", json::object())->status == 200, "close");
  c.expect(post("/sessions/" + sid + "/turns", {{"utterance", "one more"}})->status == 409, "turn after close");
  c.expect(post("/sessions/" + sid + "/close", json::object())->status == 409, "second close");
  c.expect(http.Get("/sessions/unknown")->status == 404, "unknown session");

  // Persisted transcript round-trips and validates.
  const auto persisted = load_dialogues(store.transcripts_path());
  c.expect(persisted.size() == 1, "one transcript persisted");
  if (!persisted.empty()) {
    c.expect(validate_dialogue(persisted[0]).ok(), "persisted transcript fails validation");
    c.expect(persisted[0].turns.size() == 6, "persisted transcript turn count");
  }

  // Two raters in perfect agreement on two sessions.
  const auto sid2 = json::parse(post("/sessions", {{"scenario_id", "scn-1"}, {"policy_id", "mock"}})->body)
                        .at("session_id").get<std::string>();
  post("/sessions/" + sid2 + "/turns", {{"utterance", user[0]}});
  post("/sessions/" + sid2 + "/close", json::object());
  int base = 3;
  for (const auto& s : {sid, sid2}) {
    json scores;
    for (const auto& d : service::rating_dimensions()) scores[d] = base;
    for (const auto* rater : {"rater-1", "rater-2"}) {
      auto res = post("/sessions/" + s + "/ratings", {{"rater_id", rater}, {"scores", scores}});
      c.expect(res && res->status == 200, "rating accepted");
    }
    ++base;
  }
  json bad;
  for (const auto& d : service::rating_dimensions()) bad[d] = 6;
  c.expect(post("/sessions/" + sid + "/ratings", {{"rater_id", "rater-3"}, {"scores", bad}})->status == 422,
           "score 6 rejected");
  auto agreement = http.Get("/reports/agreement?dimension=EA");
  c.expect(agreement && agreement->status == 200, "agreement report");
  if (agreement && agreement->status == 200) {
    c.near(json::parse(agreement->body).at("kappa").get<double>(), 1.0, 1e-12, "kappa");
  }
  server.stop();
  serving.join();
  return c.ok;
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    double budget_s;
    std::function<bool(Check&)> run;
  };
  const std::vector<Criterion> criteria{
      {"dpo_loss_oracle", 1.0, check_dpo},
      {"sft_loss_oracle", 1.0, check_sft},
      {"preference_builder_oracle", 10.0, check_preferences},
      {"pseudo_label_oracle", 10.0, check_pseudo_labels},
      {"iterative_loop_mechanics", 120.0, check_loop},
      {"parser_round_trip", 5.0, check_parser},
      {"metric_oracles", 5.0, check_metrics},
      {"corpus_pipeline", 30.0, check_corpus},
      {"sensitivity_sweep", 600.0, check_sweep},
      {"ablation_masks", 120.0, check_ablation},
      {"service_contract", 60.0, check_service},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.expect(secs < cr.budget_s, "exceeded " + std::to_string(cr.budget_s) + " s budget");
    std::printf("%s %-28s %8.3fs %s\n", c.ok ? "PASS" : "FAIL", cr.name.c_str(), secs,
                c.ok ? "" : c.detail.str().c_str());
    std::fflush(stdout);
    if (!c.ok) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
