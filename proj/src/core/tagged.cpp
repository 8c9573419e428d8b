#include "ens/core/tagged.hpp"

#include <cctype>

#include "ens/core/text.hpp"

namespace ens {

std::string ParseFailure::describe() const {
  std::string out(error_code_name(code));
  if (component) {
    out += " [";
    out += ens::code(*component);
    out += "]";
  }
  out += ": ";
  out += message;
  return out;
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

ParseFailure fail(ErrorCode code, std::optional<Component> c, std::string message) {
  return ParseFailure{code, c, std::move(message)};
}

// True when `s` holds lead_in(c) at `pos`, followed by whitespace or the end.
bool lead_in_at(std::string_view s, std::size_t pos, Component c) {
  const auto li = lead_in(c);
  if (s.compare(pos, li.size(), li) != 0) return false;
  const std::size_t after = pos + li.size();
  return after == s.size() || is_space(s[after]);
}

// Earliest position >= from, preceded by whitespace, where a lead-in of a
// component after `c` begins. Returns s.size() when there is none.
std::size_t next_boundary(std::string_view s, std::size_t from, Component c) {
  for (std::size_t q = from; q < s.size(); ++q) {
    if (q == 0 || !is_space(s[q - 1])) continue;
    for (auto later = static_cast<int>(c) + 1; later < static_cast<int>(kComponentCount); ++later) {
      if (lead_in_at(s, q, static_cast<Component>(later))) return q;
    }
  }
  return s.size();
}

std::size_t count_occurrences(std::string_view s, std::string_view needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string_view::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

std::string_view strip_terminal_period(std::string_view s) {
  s = text::trim(s);
  while (!s.empty() && (s.back() == '.' || s.back() == '!')) s.remove_suffix(1);
  return text::trim(s);
}

std::optional<std::string> component_text(const EnsCotRationale& r, Component c) {
  switch (c) {
    case Component::kEmotion:
      if (!r.emotion) return std::nullopt;
      return std::string(name(*r.emotion)) + ".";
    case Component::kTrigger: return r.trigger;
    case Component::kAssessment: return r.assessment;
    case Component::kPerspectiveShift: return r.perspective_shift;
    case Component::kMindsetTransformation: return r.mindset_transformation;
    case Component::kStrategy:
      if (!r.strategy) return std::nullopt;
      return std::string(name(*r.strategy)) + ".";
    case Component::kStrategyReason: return r.strategy_reason;
    case Component::kResponse: return r.response;
  }
  return std::nullopt;
}

std::optional<Component> first_expected(AblationMask expected, int from) {
  for (int k = from; k < static_cast<int>(kComponentCount); ++k) {
    if (expected.includes(static_cast<Component>(k))) return static_cast<Component>(k);
  }
  return std::nullopt;
}

}  // namespace

std::optional<ParseFailure> check_component_text(Component component, std::string_view raw) {
  const auto t = text::trim(raw);
  if (t.empty()) {
    return fail(ErrorCode::kMissingComponent, component, "component text is empty");
  }
  for (auto tag : {kOpenRationale, kCloseRationale, kOpenAnswer, kCloseAnswer}) {
    if (t.find(tag) != std::string_view::npos) {
      return fail(ErrorCode::kTagStructure, component,
                  "component text contains the reserved tag " + std::string(tag));
    }
  }
  // The parser sees the text preceded and followed by whitespace.
  const std::string padded = " " + std::string(t) + " ";
  const std::size_t q = next_boundary(padded, 1, component);
  if (q < padded.size()) {
    return fail(ErrorCode::kLeadIn, component,
                "component text contains a later component's lead-in at offset " +
                    std::to_string(q - 1));
  }
  if (component == Component::kStrategyReason &&
      t.find(kStrategyReasonMarker) == std::string_view::npos) {
    return fail(ErrorCode::kLeadIn, component,
                "strategy reason lacks \"" + std::string(kStrategyReasonMarker) + "\"");
  }
  return std::nullopt;
}

std::string render_rationale_body(const EnsCotRationale& rationale, AblationMask mask,
                                  std::string_view separator) {
  if (!mask.includes(Component::kResponse)) {
    throw Error(ErrorCode::kMask, "ablation mask must include RG");
  }
  std::string out;
  for (auto c : all_components()) {
    if (!mask.includes(c)) continue;
    const auto value = component_text(rationale, c);
    if (!value) {
      throw Error(ErrorCode::kMissingComponent,
                  "component " + std::string(code(c)) + " is required by the mask but absent");
    }
    if (auto problem = check_component_text(c, *value)) {
      throw Error(problem->code, problem->describe());
    }
    if (!out.empty()) out.append(separator);
    out.append(lead_in(c));
    out.push_back(' ');
    out.append(text::trim(*value));
  }
  return out;
}

Result<EnsCotRationale> parse_rationale_body(std::string_view body,
                                             std::optional<AblationMask> expected) {
  body = text::trim(body);
  EnsCotRationale r;
  bool saw_response = false;
  int next_index = 0;
  std::size_t pos = 0;

  while (pos < body.size()) {
    std::optional<Component> found;
    for (int k = next_index; k < static_cast<int>(kComponentCount); ++k) {
      if (lead_in_at(body, pos, static_cast<Component>(k))) {
        found = static_cast<Component>(k);
        break;
      }
    }
    if (!found) {
      auto want = expected ? first_expected(*expected, next_index)
                           : std::optional<Component>(static_cast<Component>(next_index));
      return fail(ErrorCode::kLeadIn, want,
                  "text at offset " + std::to_string(pos) + " does not open with an expected lead-in");
    }
    const Component c = *found;
    if (expected) {
      if (auto missing = first_expected(*expected, next_index);
          missing && static_cast<int>(*missing) < static_cast<int>(c)) {
        return fail(ErrorCode::kLeadIn, missing, "component lead-in absent");
      }
      if (!expected->includes(c)) {
        return fail(ErrorCode::kLeadIn, c, "component not allowed by the ablation mask");
      }
    }
    const std::size_t content_start = pos + lead_in(c).size();
    const std::size_t end = next_boundary(body, content_start, c);
    const auto content = text::trim(body.substr(content_start, end - content_start));
    if (content.empty()) {
      return fail(ErrorCode::kMissingComponent, c, "component text is empty");
    }
    switch (c) {
      case Component::kEmotion: {
        auto e = parse_emotion(strip_terminal_period(content));
        if (!e) {
          return fail(ErrorCode::kCatalog, c,
                      "\"" + std::string(content) + "\" is not a catalog emotion");
        }
        r.emotion = e;
        break;
      }
      case Component::kTrigger: r.trigger = std::string(content); break;
      case Component::kAssessment: r.assessment = std::string(content); break;
      case Component::kPerspectiveShift: r.perspective_shift = std::string(content); break;
      case Component::kMindsetTransformation:
        r.mindset_transformation = std::string(content);
        break;
      case Component::kStrategy: {
        auto s = parse_strategy(strip_terminal_period(content));
        if (!s) {
          return fail(ErrorCode::kCatalog, c,
                      "\"" + std::string(content) + "\" is not a catalog strategy");
        }
        r.strategy = s;
        break;
      }
      case Component::kStrategyReason:
        if (content.find(kStrategyReasonMarker) == std::string_view::npos) {
          return fail(ErrorCode::kLeadIn, c,
                      "strategy reason lacks \"" + std::string(kStrategyReasonMarker) + "\"");
        }
        r.strategy_reason = std::string(content);
        break;
      case Component::kResponse:
        r.response = std::string(content);
        saw_response = true;
        break;
    }
    pos = end;
    next_index = static_cast<int>(c) + 1;
  }

  if (expected) {
    if (auto missing = first_expected(*expected, next_index)) {
      return fail(ErrorCode::kLeadIn, missing, "component lead-in absent");
    }
  }
  if (!saw_response) {
    return fail(ErrorCode::kLeadIn, Component::kResponse, "response component absent");
  }
  return r;
}

TaggedTarget render_tagged_target(const EnsCotRationale& rationale, std::string_view response,
                                  AblationMask mask) {
  if (auto problem = check_component_text(Component::kResponse, response)) {
    throw Error(problem->code, problem->describe());
  }
  std::string out;
  out.append(kOpenRationale).push_back(' ');
  out.append(render_rationale_body(rationale, mask));
  out.push_back(' ');
  out.append(kCloseRationale).push_back(' ');
  out.append(kOpenAnswer).push_back(' ');
  out.append(text::trim(response));
  out.push_back(' ');
  out.append(kCloseAnswer);
  return TaggedTarget{std::move(out)};
}

Result<TaggedParse> parse_tagged_target(std::string_view raw, std::optional<AblationMask> expected) {
  const auto t = text::trim(raw);
  for (auto tag : {kOpenRationale, kCloseRationale, kOpenAnswer, kCloseAnswer}) {
    const auto n = count_occurrences(t, tag);
    if (n != 1) {
      return fail(ErrorCode::kTagStructure, std::nullopt,
                  std::string(n == 0 ? "missing " : "duplicated ") + std::string(tag) + " tag");
    }
  }
  const auto r_open = t.find(kOpenRationale);
  const auto r_close = t.find(kCloseRationale);
  const auto a_open = t.find(kOpenAnswer);
  const auto a_close = t.find(kCloseAnswer);
  if (!(r_open == 0 && r_open < r_close && r_close < a_open && a_open < a_close &&
        a_close + kCloseAnswer.size() == t.size())) {
    return fail(ErrorCode::kTagStructure, std::nullopt,
                "expected exactly <R>...</R> followed by <A>...</A>");
  }
  const auto gap = t.substr(r_close + kCloseRationale.size(),
                            a_open - r_close - kCloseRationale.size());
  if (!text::trim(gap).empty()) {
    return fail(ErrorCode::kTagStructure, std::nullopt, "text between rationale and answer spans");
  }
  const auto answer = text::trim(
      t.substr(a_open + kOpenAnswer.size(), a_close - a_open - kOpenAnswer.size()));
  if (answer.empty()) {
    return fail(ErrorCode::kMissingComponent, Component::kResponse, "answer span is empty");
  }
  auto body = parse_rationale_body(
      t.substr(r_open + kOpenRationale.size(), r_close - r_open - kOpenRationale.size()), expected);
  if (!body) return body.error();
  return TaggedParse{std::move(body).value(), std::string(answer)};
}

std::optional<std::string> rationale_span(std::string_view text) {
  const auto t = text::trim(text);
  const auto open = t.find(kOpenRationale);
  const auto close = t.find(kCloseRationale);
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    return std::nullopt;
  }
  return std::string(t.substr(open, close + kCloseRationale.size() - open));
}

std::optional<std::string> answer_span(std::string_view text) {
  if (count_occurrences(text, kOpenAnswer) != 1 || count_occurrences(text, kCloseAnswer) != 1) {
    return std::nullopt;
  }
  const auto open = text.find(kOpenAnswer);
  const auto close = text.find(kCloseAnswer);
  if (close < open) return std::nullopt;
  return std::string(text::trim(text.substr(open + kOpenAnswer.size(), close - open - kOpenAnswer.size())));
}

}  // namespace ens
