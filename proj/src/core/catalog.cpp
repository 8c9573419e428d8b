#include "ens/core/catalog.hpp"

#include <string>

#include "ens/core/text.hpp"

namespace ens {

namespace {

constexpr std::array<std::string_view, kEmotionCount> kEmotionNames = {
    "joy",   "confidence", "positivity",     "gratitude",   "trust", "surprise",
    "anger", "disappointment", "frustration", "fear", "anxiety", "neutral",
};

constexpr std::array<std::string_view, kStrategyCount> kStrategyNames = {
    "savoring",           "positive reinforcement", "expressing optimism",
    "cognitive reappraisal", "positive framing",    "emotion diffusion",
    "expressive suppression", "active listening",   "perspective-taking",
    "problem solving",    "escalate assurance",     "no strategy",
};

constexpr std::array<std::string_view, kStrategyCount> kStrategyDisplay = {
    "Savoring",           "Positive Reinforcement", "Expressing Optimism",
    "Cognitive Reappraisal", "Positive Framing",    "Emotion Diffusion",
    "Expressive Suppression", "Active Listening",   "Perspective-Taking",
    "Problem Solving",    "Escalate Assurance",     "No Strategy",
};

constexpr std::array<std::string_view, kStrategyCount> kDefinitions = {
    "Actively appreciating and amplifying positive moments (e.g., shared successes, agreement "
    "points) to maintain a constructive climate and strengthen relationships to help achieve "
    "integrative outcomes.",
    "Compliment and acknowledge constructive behavior or ideas to enhance positive affect, "
    "reinforce cooperation, and make progress toward mutual goals easier.",
    "Communicate a credible, positive outlook about reaching a mutually beneficial deal to "
    "encourage cooperative effort.",
    "Reinterpret the situation to alter its emotional impact (e.g., view criticism as useful "
    "feedback) to reduce defensiveness and keep focus on objectives; linked to better outcomes.",
    "Shift emphasis from potential losses to achievable gains to transform competitive stances "
    "into collaborative problem-solving.",
    "Acknowledge heightened affect and de-escalate with calm, soft language and constructive "
    "addressing of issues to prevent conflict escalation.",
    "Temporarily inhibit or mask one's emotional display to maintain composure and avoid "
    "escalation in sensitive moments.",
    "Attend to verbal and non-verbal cues, paraphrase, and validate concerns so the counterpart "
    "feels heard and understood; builds trust and diagnostic clarity.",
    "Deliberately adopt the counterpart's viewpoint to infer their motives, constraints, and "
    "emotions, enabling more appropriate and empathetic responses.",
    "Collaboratively identify, analyze, and resolve issues to craft integrative solutions that "
    "meet mutual needs and goals.",
    "Address concerns with concrete guarantees, clarifications, and commitments (e.g., evidence, "
    "safeguards) to increase confidence and trust, stabilizing the interaction.",
    "Refers to a neutral, task-focused response without explicit emotion management when affect "
    "is low/neutral or strategy use is unwarranted.",
};

constexpr std::array<std::string_view, kStrategyCount> kExemplars = {
    "It's great to see your excitement, and we appreciate your clear expectations. Let's discuss "
    "the salary range for the project manager role.",
    "Great, thank you for being open to compromise. It's important for us to work together to "
    "ensure a productive and motivating work environment. Let's continue discussing your needs "
    "and expectations for the company car and workday",
    "We appreciate your confidence in your abilities and your willingness to work with us. Let's "
    "discuss the promotion track and how we can align our expectations for mutual success.",
    "Thank you for sharing your concerns. Let's explore other opportunities that match your "
    "skills and experience.",
    "I understand your concerns about the workday length. Let's explore how a shorter workday "
    "could lead to improved productivity and work-life balance while ensuring your career "
    "growth expectations are met.",
    "I am glad we could reach an agreement. I look forward to working with you and discussing "
    "opportunities for professional growth.",
    "I appreciate your honesty. Let's discuss the employer's offer and how it can align with "
    "your career goals. How do you see yourself growing within the company?",
    "Thank you for sharing your expectations. I understand your desire for a company car. Let's "
    "discuss what we can do to ensure a mutually beneficial agreement.",
    "Thank you for sharing your thoughts on the position. Let's explore the terms of the offer "
    "further to find a mutually beneficial solution. Can we discuss the salary range for the "
    "project manager role, and how it aligns with your expectations?",
    "I understand your concerns about work hours. How about we discuss possible compromises "
    "that can work for both of us?",
    "I understand your concerns, but we are willing to discuss a salary range of 80-100,000. "
    "This is an opportunity for us to align our expectations and find a mutually beneficial "
    "agreement.",
    "Thank you for sharing your expectations. However, we cannot accommodate your requested "
    "salary at this time. We appreciate your understanding and would be willing to discuss "
    "alternative options.",
};

std::string strip_quotes(std::string_view s) {
  std::string out(text::trim(s));
  auto strip = [&](std::string_view q) {
    if (out.size() >= 2 * q.size() && out.compare(0, q.size(), q) == 0) {
      out.erase(0, q.size());
      return true;
    }
    return false;
  };
  auto strip_tail = [&](std::string_view q) {
    if (out.size() >= q.size() && out.compare(out.size() - q.size(), q.size(), q) == 0) {
      out.erase(out.size() - q.size());
      return true;
    }
    return false;
  };
  for (std::string_view q : {"\"", "'", "\xE2\x80\x9C", "\xE2\x80\x98", "`"}) strip(q);
  for (std::string_view q : {"\"", "'", "\xE2\x80\x9D", "\xE2\x80\x99", "`"}) strip_tail(q);
  return out;
}

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view raw) {
  const std::string key = text::normalize_label(strip_quotes(raw));
  for (std::size_t i = 0; i < N; ++i) {
    if (text::normalize_label(names[i]) == key) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

}  // namespace

const std::array<Emotion, kEmotionCount>& all_emotions() {
  static const std::array<Emotion, kEmotionCount> all = [] {
    std::array<Emotion, kEmotionCount> a{};
    for (std::size_t i = 0; i < kEmotionCount; ++i) a[i] = static_cast<Emotion>(i);
    return a;
  }();
  return all;
}

const std::array<Strategy, kStrategyCount>& all_strategies() {
  static const std::array<Strategy, kStrategyCount> all = [] {
    std::array<Strategy, kStrategyCount> a{};
    for (std::size_t i = 0; i < kStrategyCount; ++i) a[i] = static_cast<Strategy>(i);
    return a;
  }();
  return all;
}

std::string_view name(Emotion e) { return kEmotionNames[static_cast<std::size_t>(e)]; }
std::string_view name(Strategy s) { return kStrategyNames[static_cast<std::size_t>(s)]; }
std::string_view display_name(Strategy s) { return kStrategyDisplay[static_cast<std::size_t>(s)]; }
std::string_view definition(Strategy s) { return kDefinitions[static_cast<std::size_t>(s)]; }
std::string_view exemplar_utterance(Strategy s) {
  return kExemplars[static_cast<std::size_t>(s)];
}

std::optional<Emotion> parse_emotion(std::string_view text) {
  return lookup<Emotion>(kEmotionNames, text);
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  return lookup<Strategy>(kStrategyNames, text);
}

}  // namespace ens
