#include <doctest.h>

#include "ens/core/dialogue.hpp"
#include "ens/core/tagged.hpp"
#include "ens/core/text.hpp"
#include "fixtures.hpp"

using namespace ens;

namespace {

EnsCotRationale sample_rationale() {
  EnsCotRationale r;
  r.emotion = Emotion::kFrustration;
  r.trigger = "the delayed answer about the budget.";
  r.assessment = "the process ignores their needs.";
  r.perspective_shift = "The delay may come from approvals elsewhere.";
  r.mindset_transformation = "Delays can be shortened when both sides plan together.";
  r.strategy = Strategy::kEmotionDiffusion;
  r.strategy_reason = "calm the exchange, the agent uses emotion diffusion.";
  r.response = "I hear you. Let us set a date for the decision now.";
  return r;
}

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("catalog names parse back case-insensitively") {
    for (auto e : all_emotions()) CHECK(parse_emotion(name(e)) == e);
    for (auto s : all_strategies()) {
      CHECK(parse_strategy(name(s)) == s);
      CHECK(parse_strategy(display_name(s)) == s);
    }
    CHECK(parse_strategy("Perspective-Taking") == Strategy::kPerspectiveTaking);
    CHECK(parse_emotion("  ANXIETY ") == Emotion::kAnxiety);
    CHECK_FALSE(parse_emotion("boredom").has_value());
    CHECK_FALSE(parse_strategy("bribery").has_value());
  }

  TEST_CASE("mask settings select the documented components") {
    using C = Component;
    CHECK(AblationMask::setting(0)->is_full());
    CHECK_FALSE(AblationMask::setting(1)->includes(C::kTrigger));
    CHECK_FALSE(AblationMask::setting(1)->includes(C::kAssessment));
    CHECK_FALSE(AblationMask::setting(2)->includes(C::kPerspectiveShift));
    CHECK_FALSE(AblationMask::setting(2)->includes(C::kMindsetTransformation));
    CHECK_FALSE(AblationMask::setting(3)->includes(C::kStrategy));
    CHECK_FALSE(AblationMask::setting(3)->includes(C::kStrategyReason));
    CHECK(AblationMask::setting(4)->count() == 3);
    CHECK(AblationMask::setting(5)->count() == 2);
    for (int id = 0; id < kAblationSettingCount; ++id) CHECK(AblationMask::setting(id)->includes(C::kResponse));
    CHECK_FALSE(AblationMask::setting(6).has_value());
    CHECK_FALSE(AblationMask::setting(-1).has_value());
    CHECK(AblationMask::parse("EM, ET,RG") == AblationMask::of({C::kEmotion, C::kTrigger, C::kResponse}));
    CHECK_FALSE(AblationMask::parse("EM,XX").has_value());
  }

  TEST_CASE("render then parse is the identity on a full octuple") {
    const auto r = sample_rationale();
    const auto t = render_tagged_target(r, r.response, AblationMask::full());
    CHECK(t.text.rfind("<R> The user feels frustration. User's Emotion is triggered by", 0) == 0);
    CHECK(t.text.find("To calm the exchange, the agent uses") != std::string::npos);
    const auto p = parse_tagged_target(t.text, AblationMask::full());
    REQUIRE(p.ok());
    CHECK(p.value().rationale == r);
    CHECK(p.value().response == r.response);
  }

  TEST_CASE("masked rendering omits excluded components") {
    const auto r = sample_rationale();
    const auto m3 = *AblationMask::setting(3);
    const auto t = render_tagged_target(apply_mask(r, m3), r.response, m3).text;
    CHECK(t.find("The agent chooses") == std::string::npos);
    CHECK(t.find("the agent uses") == std::string::npos);
    const auto p = parse_tagged_target(t, m3);
    REQUIRE(p.ok());
    CHECK_FALSE(p.value().rationale.strategy.has_value());
    // The full mask expects SS, so the masked text is rejected.
    const auto strict = parse_tagged_target(t, AblationMask::full());
    REQUIRE_FALSE(strict.ok());
    CHECK(strict.error().code == ErrorCode::kLeadIn);
    CHECK(strict.error().component == Component::kStrategy);
  }

  TEST_CASE("rendering refuses masks without RG and missing components") {
    auto r = sample_rationale();
    CHECK_THROWS_AS(render_rationale_body(r, AblationMask::full().without(Component::kResponse)), Error);
    r.trigger.reset();
    try {
      render_tagged_target(r, r.response, AblationMask::full());
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kMissingComponent);
    }
  }

  TEST_CASE("component text that embeds a later lead-in is rejected") {
    auto problem = check_component_text(Component::kTrigger, "a reply. The agent chooses savoring.");
    REQUIRE(problem.has_value());
    CHECK(problem->code == ErrorCode::kLeadIn);
    CHECK(check_component_text(Component::kTrigger, "tomorrow's deadline").has_value() == false);
    CHECK(check_component_text(Component::kResponse, "use <A> here")->code == ErrorCode::kTagStructure);
    CHECK(check_component_text(Component::kStrategyReason, "help out")->code == ErrorCode::kLeadIn);
  }

  TEST_CASE("structural errors are reported with codes") {
    CHECK(parse_tagged_target("no tags at all").error().code == ErrorCode::kTagStructure);
    CHECK(parse_tagged_target("<A> x </A> <R> Agent: x </R>").error().code == ErrorCode::kTagStructure);
    CHECK(parse_tagged_target("<R> Agent: x </R> <A> </A>").error().code == ErrorCode::kMissingComponent);
    const auto bad_emotion = parse_tagged_target("<R> The user feels glee. Agent: ok </R> <A> ok </A>");
    REQUIRE_FALSE(bad_emotion.ok());
    CHECK(bad_emotion.error().code == ErrorCode::kCatalog);
    CHECK(bad_emotion.error().component == Component::kEmotion);
    CHECK(parse_tagged_target("<R> Agent: ok </R> <A> ok </A>", AblationMask::of({Component::kResponse})).ok());
  }

  TEST_CASE("spans are extracted from tagged text") {
    const std::string t = "<R> The user feels joy. Agent: hi </R> <A> hi there </A>";
    CHECK(rationale_span(t) == "<R> The user feels joy. Agent: hi </R>");
    CHECK(answer_span(t) == "hi there");
    CHECK_FALSE(answer_span("<A> a </A> <A> b </A>").has_value());
  }

  TEST_CASE("dialogue validation flags order, rationale and response violations") {
    Dialogue d = testing::sample_corpus()[0];
    CHECK(validate_dialogue(d).ok());
    Dialogue swapped = d;
    std::swap(swapped.turns[0], swapped.turns[1]);
    bool saw_order = false;
    for (const auto& v : validate_dialogue(swapped).violations) saw_order |= v.code == ErrorCode::kTurnOrder;
    CHECK(saw_order);
    Dialogue mismatch = d;
    mismatch.turns[1].utterance = "something else";
    CHECK_FALSE(validate_dialogue(mismatch).ok());
    Dialogue missing = d;
    missing.turns[1].rationale->strategy.reset();
    CHECK(validate_dialogue(missing).violations.at(0).code == ErrorCode::kMissingComponent);
    CHECK(validate_dialogue(missing, *AblationMask::setting(3)).ok());
  }

  TEST_CASE("dialogue JSON round-trips") {
    const auto& d = testing::sample_corpus()[3];
    const auto back = dialogue_from_json(to_json(d));
    CHECK(to_json(back) == to_json(d));
    CHECK_THROWS_AS(dialogue_from_json(nlohmann::json{{"id", "x"}}), Error);
  }

  TEST_CASE("text helpers") {
    CHECK(text::trim("  a b ") == "a b");
    CHECK(text::normalize_for_dedup("Hello,   World!") == text::normalize_for_dedup("hello world"));
    CHECK(text::derive_seed(1, 2, 3) == text::derive_seed(1, 2, 3));
    CHECK(text::derive_seed(1, 2, 3) != text::derive_seed(1, 2, 4));
    CHECK(text::word_count("one two  three") == 3);
  }
}
