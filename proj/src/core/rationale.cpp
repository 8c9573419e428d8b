#include "ens/core/rationale.hpp"

#include <bit>
#include <cctype>

#include "ens/core/error.hpp"
#include "ens/core/text.hpp"

namespace ens {

namespace {

constexpr std::array<std::string_view, kComponentCount> kCodes = {"EM", "ET", "IA", "PS",
                                                                  "MT", "SS", "SR", "RG"};

constexpr std::array<std::string_view, kComponentCount> kLeadIns = {
    "The user feels",
    "User's Emotion is triggered by",
    "The user thinks",
    "Enable the user to consider the situation from a different angle:",
    "Enable the user to think about reframing the belief:",
    "The agent chooses",
    "To",
    "Agent:",
};

}  // namespace

const std::array<Component, kComponentCount>& all_components() {
  static const std::array<Component, kComponentCount> all = {
      Component::kEmotion,          Component::kTrigger,
      Component::kAssessment,       Component::kPerspectiveShift,
      Component::kMindsetTransformation, Component::kStrategy,
      Component::kStrategyReason,   Component::kResponse,
  };
  return all;
}

std::string_view code(Component c) { return kCodes[static_cast<std::size_t>(c)]; }

std::optional<Component> component_from_code(std::string_view c) {
  const std::string upper = [&] {
    std::string s(text::trim(c));
    for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return s;
  }();
  for (std::size_t i = 0; i < kComponentCount; ++i) {
    if (kCodes[i] == upper) return static_cast<Component>(i);
  }
  return std::nullopt;
}

std::string_view lead_in(Component c) { return kLeadIns[static_cast<std::size_t>(c)]; }

AblationMask AblationMask::of(std::initializer_list<Component> components) {
  AblationMask m;
  for (auto c : components) m = m.with(c);
  return m;
}

std::optional<AblationMask> AblationMask::setting(int id) {
  using C = Component;
  switch (id) {
    case 0: return full();
    case 1: return full().without(C::kTrigger).without(C::kAssessment);
    case 2: return full().without(C::kPerspectiveShift).without(C::kMindsetTransformation);
    case 3: return full().without(C::kStrategy).without(C::kStrategyReason);
    case 4: return of({C::kStrategy, C::kStrategyReason, C::kResponse});
    case 5: return of({C::kStrategy, C::kResponse});
    default: return std::nullopt;
  }
}

std::optional<AblationMask> AblationMask::parse(std::string_view list) {
  AblationMask m;
  for (const auto& part : text::split_whitespace([&] {
         std::string s(list);
         for (auto& ch : s)
           if (ch == ',') ch = ' ';
         return s;
       }())) {
    auto c = component_from_code(part);
    if (!c) return std::nullopt;
    m = m.with(*c);
  }
  return m;
}

AblationMask AblationMask::with(Component c) const {
  return AblationMask(static_cast<std::uint8_t>(bits_ | (1U << static_cast<int>(c))));
}

AblationMask AblationMask::without(Component c) const {
  return AblationMask(static_cast<std::uint8_t>(bits_ & ~(1U << static_cast<int>(c))));
}

std::size_t AblationMask::count() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::string AblationMask::to_string() const {
  std::string out;
  for (auto c : all_components()) {
    if (!includes(c)) continue;
    if (!out.empty()) out.push_back(',');
    out.append(code(c));
  }
  return out;
}

AblationMask EnsCotRationale::present() const {
  AblationMask m = AblationMask::of({Component::kResponse});
  if (emotion) m = m.with(Component::kEmotion);
  if (trigger) m = m.with(Component::kTrigger);
  if (assessment) m = m.with(Component::kAssessment);
  if (perspective_shift) m = m.with(Component::kPerspectiveShift);
  if (mindset_transformation) m = m.with(Component::kMindsetTransformation);
  if (strategy) m = m.with(Component::kStrategy);
  if (strategy_reason) m = m.with(Component::kStrategyReason);
  return m;
}

EnsCotRationale apply_mask(const EnsCotRationale& rationale, AblationMask mask) {
  if (!mask.includes(Component::kResponse)) {
    throw Error(ErrorCode::kMask, "ablation mask must include RG");
  }
  EnsCotRationale out = rationale;
  if (!mask.includes(Component::kEmotion)) out.emotion.reset();
  if (!mask.includes(Component::kTrigger)) out.trigger.reset();
  if (!mask.includes(Component::kAssessment)) out.assessment.reset();
  if (!mask.includes(Component::kPerspectiveShift)) out.perspective_shift.reset();
  if (!mask.includes(Component::kMindsetTransformation)) out.mindset_transformation.reset();
  if (!mask.includes(Component::kStrategy)) out.strategy.reset();
  if (!mask.includes(Component::kStrategyReason)) out.strategy_reason.reset();
  return out;
}

}  // namespace ens
