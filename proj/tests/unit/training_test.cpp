#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "ens/core/tagged.hpp"
#include "ens/model/embedder.hpp"
#include "ens/training/agent.hpp"
#include "ens/training/config.hpp"
#include "ens/training/loop.hpp"
#include "ens/training/losses.hpp"
#include "ens/training/preference.hpp"
#include "ens/training/pseudo_label.hpp"
#include "ens/training/stages.hpp"
#include "fixtures.hpp"

using namespace ens;
using namespace ens::training;

namespace {

ScoredCompletion scored(const std::string& text, std::optional<double> sim) { return {text, sim}; }

std::string full_target(const LabeledRecord& r) { return target_of(r, AblationMask::full()).text; }

}  // namespace

TEST_SUITE("training") {
  TEST_CASE("config parsing, required keys and overrides") {
    auto kv = KeyValueConfig::parse("# thresholds\nthresholds.tau1 = 0.9\nthresholds.tau2=0.3\n\nseed = 7\n");
    CHECK(kv.require("thresholds.tau1") == "0.9");
    kv.apply_override("seed=11");
    CHECK(kv.get_int("seed", 0) == 11);
    CHECK_THROWS_AS(kv.apply_override("noequals"), Error);
    CHECK_THROWS_AS(KeyValueConfig::parse("just a line"), Error);
    try {
      training_config_from(kv, true);
      FAIL("expected a missing key");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConfig);
      CHECK(std::string(e.what()).find("thresholds.tau3") != std::string::npos);
    }
    const auto c = training_config_from(kv, false);
    CHECK(c.tau1 == doctest::Approx(0.9));
    CHECK(c.seed == 11);
    const auto back = training_config_from(to_key_values(c), true);
    CHECK(to_key_values(back).dump() == to_key_values(c).dump());
  }

  TEST_CASE("config invariants") {
    TrainingConfig c;
    CHECK_NOTHROW(c.validate());
    c.tau2 = 0.9;
    CHECK_THROWS_AS(c.validate(), Error);
    c = TrainingConfig{};
    c.k = 1;
    CHECK_THROWS_AS(c.validate(), Error);
    c = TrainingConfig{};
    c.mask = AblationMask::full().without(Component::kResponse);
    CHECK_THROWS_AS(c.validate(), Error);
    KeyValueConfig kv;
    kv.set("ablation.mask", "3");
    CHECK(training_config_from(kv, false).mask == *AblationMask::setting(3));
    kv.set("ablation.mask", "9");
    CHECK_THROWS_AS(training_config_from(kv, false), Error);
    kv.set("ablation.mask", "0");
    kv.set("sampling.k", "abc");
    CHECK_THROWS_AS(training_config_from(kv, false), Error);
  }

  TEST_CASE("learning-rate schedule warms up then decays") {
    // total 10, warmup ceil(0.2 * 10) = 2
    CHECK(cosine_learning_rate(0, 10, 0.3, 0.2) == doctest::Approx(0.1));
    CHECK(cosine_learning_rate(1, 10, 0.3, 0.2) == doctest::Approx(0.2));
    CHECK(cosine_learning_rate(2, 10, 0.3, 0.2) == doctest::Approx(0.3));
    CHECK(cosine_learning_rate(6, 10, 0.3, 0.2) == doctest::Approx(0.15));
    double prev = 1.0;
    for (std::size_t s = 2; s < 10; ++s) {
      const double lr = cosine_learning_rate(s, 10, 1.0, 0.2);
      CHECK(lr <= prev);
      prev = lr;
    }
  }

  TEST_CASE("loss primitives match closed forms") {
    CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
    CHECK(softplus(800.0) == doctest::Approx(800.0));
    CHECK(softplus(-800.0) >= 0.0);
    CHECK(logistic(0.0) == doctest::Approx(0.5));
    // -log sigma(0.5 * 2) = log(1 + e^-1)
    CHECK(dpo_pair_loss(2.0, 0.5) == doctest::Approx(0.3132617));
    CHECK(dpo_pair_loss(0.0, 0.1) == doctest::Approx(std::log(2.0)));
  }

  TEST_CASE("SFT and DPO losses on a fixed-probability backend") {
    model::MockBackendConfig cfg;
    cfg.fixed_token_prob = 0.5;
    model::MockBackend b(cfg);
    const std::vector<TrainingExample> batch{{"p", "a b"}, {"q", "c d e f"}};
    // mean of 2 and 4 tokens at -log 0.5
    CHECK(sft_loss(b, batch) == doctest::Approx(3 * std::log(2.0)));
    CHECK_THROWS_AS(sft_loss(b, std::span<const TrainingExample>{}), Error);
    const std::vector<PreferencePair> pairs{{"c", "p", "<R> Agent: x </R> <A> x </A>", "bad", 0.9, std::nullopt}};
    // identical policy and reference: zero gap
    CHECK(dpo_loss(b, b, pairs, 0.1) == doctest::Approx(std::log(2.0)));
    CHECK(dpo_scored_text("<R> Agent: x </R> <A> x </A>", DpoScoreMode::kRationaleOnly) == "<R> Agent: x </R>");
  }

  TEST_CASE("preference pairs are the cross product of eligible samples") {
    const std::vector<ScoredCompletion> s{scored("a", 0.95), scored("b", 0.3), scored("c", 0.6),
                                          scored("d", std::nullopt), scored("e", 0.85)};
    const auto pairs = select_preference_pairs("ctx", "p", s, 0.8, 0.4, 0);
    REQUIRE(pairs.size() == 4);
    CHECK(pairs[0].preferred == "a");
    CHECK(pairs[0].rejected == "b");
    CHECK(pairs[1].rejected == "d");
    CHECK_FALSE(pairs[1].rejected_similarity.has_value());
    CHECK(pairs[2].preferred == "e");
    CHECK(select_preference_pairs("ctx", "p", s, 0.8, 0.4, 3).size() == 3);
    // boundaries are strict
    CHECK(select_preference_pairs("ctx", "p", {scored("x", 0.8), scored("y", 0.4)}, 0.8, 0.4, 0).empty());
    CHECK(select_preference_pairs("ctx", "p", {scored("x", 0.9)}, 0.8, 0.4, 0).empty());
    const auto back = preference_pair_from_json(to_json(pairs[1]));
    CHECK(back == pairs[1]);
  }

  TEST_CASE("pseudo-labels keep parseable samples above tau3 once per rationale") {
    const auto lab = testing::sample_labeled(2);
    const UnlabeledRecord rec{"u1", lab[0].context, lab[0].response};
    const auto full = AblationMask::full();
    const auto a = full_target(lab[0]);
    const auto a_other = render_tagged_target(lab[0].rationale, "A different reply.", full).text;
    const auto b = render_tagged_target(lab[1].rationale, lab[1].response, full).text;
    const std::vector<ScoredCompletion> s{scored("garbage", std::nullopt), scored(a, 0.95), scored(a_other, 0.9),
                                          scored(b, 0.8), scored(b, 0.81)};
    const auto kept = select_pseudo_labels(rec, s, 0.8, full);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].similarity == doctest::Approx(0.95));
    CHECK(kept[0].response == rec.response);
    CHECK(kept[0].rationale.response == rec.response);
    CHECK(kept[1].similarity == doctest::Approx(0.81));
    CHECK(dedup_key("u1", lab[0].rationale, full) != dedup_key("u2", lab[0].rationale, full));
    const auto as_labeled = to_labeled(kept[0]);
    CHECK(as_labeled.source == "pseudo");
    CHECK(as_labeled.response == rec.response);
  }

  TEST_CASE("agent turns retry unparseable samples and enforce turn order") {
    const auto labeled = testing::sample_labeled(2);
    auto script = std::make_shared<model::ScriptTable>();
    const auto prompt = render_prompt(labeled[0].context);
    script->add(prompt, {"not tagged at all"});
    model::MockBackendConfig cfg;
    cfg.script = script;
    model::MockBackend b(cfg);
    AgentOptions opts;
    opts.retry_limit = 2;
    try {
      generate_agent_turn(b, labeled[0].context, opts);
      FAIL("expected unparseable");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kGenerationUnparseable);
      CHECK(std::string(e.what()).find("3 attempts") != std::string::npos);
    }
    script->add(prompt, {full_target(labeled[0])});
    const auto turn = generate_agent_turn(b, labeled[0].context, opts);
    CHECK(turn.response == labeled[0].response);
    CHECK(turn.attempts == 1);
    CHECK(turn.selected_strategy == std::string(name(*labeled[0].rationale.strategy)));
    auto ctx = labeled[0].context;
    ctx.push_back(Turn{Speaker::kAgent, "x", std::nullopt, std::nullopt});
    CHECK_THROWS_AS(generate_agent_turn(b, ctx, opts), Error);
    CHECK_THROWS_AS(generate_agent_turn(b, {}, opts), Error);
  }

  TEST_CASE("stages record provenance and lower the objective") {
    const auto labeled = testing::sample_labeled(6);
    const auto unlabeled = testing::sample_unlabeled(6, 10);
    const auto factory = testing::desk_factory(labeled, unlabeled);
    const auto cfg = testing::desk_config();
    const auto sft = run_supervised_init(factory, training_examples(labeled, cfg.mask), cfg, 0);
    CHECK(sft.checkpoint.provenance.stage == model::Stage::kSft);
    CHECK(sft.started_from.stage == model::Stage::kBase);
    CHECK(sft.report.final_loss() < sft.report.initial_loss());
    CHECK_THROWS_AS(run_supervised_init(factory, {}, cfg, 0), Error);
    const model::HashEmbedder emb;
    const auto pairs = build_preference_set(*[&] {
      auto p = factory();
      p->restore(sft.checkpoint);
      return p;
    }(), emb, unlabeled, cfg, 1);
    REQUIRE_FALSE(pairs.empty());
    const auto dpo = run_dpo(factory, sft.checkpoint, pairs, cfg, 1);
    CHECK(dpo.checkpoint.provenance.stage == model::Stage::kDpo);
    CHECK(dpo.started_from.stage == model::Stage::kSft);
    CHECK(dpo.report.final_loss() <= dpo.report.initial_loss());
    CHECK_THROWS_AS(run_dpo(factory, dpo.checkpoint, pairs, cfg, 2), Error);
  }

  TEST_CASE("a failing stage persists a failed state") {
    testing::TempDir dir("loop");
    const auto labeled = testing::sample_labeled(4);
    const auto unlabeled = testing::sample_unlabeled(4, 10);
    const auto inner = testing::desk_factory(labeled, unlabeled);
    int calls = 0;
    model::BackendFactory flaky = [&]() -> std::unique_ptr<model::GenerativeBackend> {
      if (++calls > 2) throw Error(ErrorCode::kBackend, "device lost");
      return inner();
    };
    LoopOptions opts;
    opts.run_id = "flaky";
    opts.runs_dir = dir.str();
    const model::HashEmbedder emb;
    CHECK_THROWS_AS(run_iterative_loop(flaky, emb, labeled, unlabeled, testing::desk_config(), opts), Error);
    const auto state = nlohmann::json::parse(io::read_file((dir.path() / "flaky" / "state.json").string()));
    CHECK(state["status"] == "failed");
    CHECK(state["error"].get<std::string>().find("device lost") != std::string::npos);
    CHECK(std::filesystem::exists(dir.path() / "flaky" / "checkpoints" / "sft-0"));
  }
}
