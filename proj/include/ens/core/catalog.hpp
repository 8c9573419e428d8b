#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace ens {

// Closed inventory of user emotions.
enum class Emotion {
  kJoy,
  kConfidence,
  kPositivity,
  kGratitude,
  kTrust,
  kSurprise,
  kAnger,
  kDisappointment,
  kFrustration,
  kFear,
  kAnxiety,
  kNeutral,
};

// Closed catalog of emotion-aware negotiation strategies.
enum class Strategy {
  kSavoring,
  kPositiveReinforcement,
  kExpressingOptimism,
  kCognitiveReappraisal,
  kPositiveFraming,
  kEmotionDiffusion,
  kExpressiveSuppression,
  kActiveListening,
  kPerspectiveTaking,
  kProblemSolving,
  kEscalateAssurance,
  kNoStrategy,
};

inline constexpr std::size_t kEmotionCount = 12;
inline constexpr std::size_t kStrategyCount = 12;

const std::array<Emotion, kEmotionCount>& all_emotions();
const std::array<Strategy, kStrategyCount>& all_strategies();

// Canonical lowercase names, e.g. "perspective-taking".
std::string_view name(Emotion e);
std::string_view name(Strategy s);

// Title-cased display names, e.g. "Positive Framing".
std::string_view display_name(Strategy s);

// Case-insensitive, tolerant of hyphen/whitespace differences and
// surrounding quotes.
std::optional<Emotion> parse_emotion(std::string_view text);
std::optional<Strategy> parse_strategy(std::string_view text);

// One-sentence definition of each strategy, used in prompt instantiation.
std::string_view definition(Strategy s);

// Anchor utterance realizing each strategy (job-interview domain).
std::string_view exemplar_utterance(Strategy s);

}  // namespace ens
