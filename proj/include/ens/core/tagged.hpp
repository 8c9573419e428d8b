#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ens/core/rationale.hpp"
#include "ens/core/result.hpp"

namespace ens {

inline constexpr std::string_view kOpenRationale = "<R>";
inline constexpr std::string_view kCloseRationale = "</R>";
inline constexpr std::string_view kOpenAnswer = "<A>";
inline constexpr std::string_view kCloseAnswer = "</A>";

// Training target: "<R> rationale </R> <A> response </A>".
struct TaggedTarget {
  std::string text;

  bool operator==(const TaggedTarget&) const = default;
};

struct TaggedParse {
  EnsCotRationale rationale;
  std::string response;

  bool operator==(const TaggedParse&) const = default;
};

// Checks that a component text is non-empty and cannot be confused with a
// delimiter by the parser. Returns the violation, if any.
std::optional<ParseFailure> check_component_text(Component component, std::string_view text);

// Renders the mask-selected components in octuple order, each opened by its
// lead-in, joined by `separator`. Throws MissingComponent / LeadInError.
std::string render_rationale_body(const EnsCotRationale& rationale, AblationMask mask,
                                  std::string_view separator = " ");

// Splits a rationale body at lead-in phrases. When `expected` is set, every
// expected component must be present and no other may appear; otherwise any
// subset that includes RG is accepted.
Result<EnsCotRationale> parse_rationale_body(std::string_view body,
                                             std::optional<AblationMask> expected);

TaggedTarget render_tagged_target(const EnsCotRationale& rationale, std::string_view response,
                                  AblationMask mask = AblationMask::full());

// Never throws on malformed text; failures come back as a ParseFailure.
Result<TaggedParse> parse_tagged_target(std::string_view text,
                                        std::optional<AblationMask> expected = AblationMask::full());

// "<R> ... </R>" prefix of a target, used for rationale-only scoring.
std::optional<std::string> rationale_span(std::string_view text);

// Trimmed contents of the single answer span.
std::optional<std::string> answer_span(std::string_view text);

}  // namespace ens
