#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ens/core/catalog.hpp"

namespace ens {

// Octuple components in their fixed rendering order.
enum class Component : std::uint8_t {
  kEmotion,                // EM
  kTrigger,                // ET
  kAssessment,             // IA
  kPerspectiveShift,       // PS
  kMindsetTransformation,  // MT
  kStrategy,               // SS
  kStrategyReason,         // SR
  kResponse,               // RG
};

inline constexpr std::size_t kComponentCount = 8;

const std::array<Component, kComponentCount>& all_components();
std::string_view code(Component c);
std::optional<Component> component_from_code(std::string_view code);

// Mandated opening phrase of each rendered component.
std::string_view lead_in(Component c);

// The strategy-reason component reads "To <purpose>, the agent uses <...>";
// this is its required second marker.
inline constexpr std::string_view kStrategyReasonMarker = ", the agent uses";

class AblationMask {
 public:
  constexpr AblationMask() = default;

  static constexpr AblationMask full() { return AblationMask(0xFF); }
  static AblationMask of(std::initializer_list<Component> components);
  // Settings 0..5 of the component-removal study; nullopt for other ids.
  static std::optional<AblationMask> setting(int id);
  // Parses "EM,ET,SS,SR,RG" style lists.
  static std::optional<AblationMask> parse(std::string_view list);

  bool includes(Component c) const { return (bits_ >> static_cast<int>(c)) & 1U; }
  AblationMask with(Component c) const;
  AblationMask without(Component c) const;
  std::size_t count() const;
  bool is_full() const { return bits_ == 0xFF; }
  std::uint8_t bits() const { return bits_; }
  std::string to_string() const;

  bool operator==(const AblationMask&) const = default;

 private:
  constexpr explicit AblationMask(std::uint8_t bits) : bits_(bits) {}
  std::uint8_t bits_ = 0;
};

inline constexpr int kAblationSettingCount = 6;

struct EnsCotRationale {
  std::optional<Emotion> emotion;
  std::optional<std::string> trigger;
  std::optional<std::string> assessment;
  std::optional<std::string> perspective_shift;
  std::optional<std::string> mindset_transformation;
  std::optional<Strategy> strategy;
  // Text following the leading "To "; must contain ", the agent uses".
  std::optional<std::string> strategy_reason;
  std::string response;

  // Components that are present (response always counts).
  AblationMask present() const;

  bool operator==(const EnsCotRationale&) const = default;
};

// Drops every component the mask excludes. Throws MaskError when the mask
// excludes the response.
EnsCotRationale apply_mask(const EnsCotRationale& rationale, AblationMask mask);

}  // namespace ens
