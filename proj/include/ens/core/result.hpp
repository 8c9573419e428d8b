#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "ens/core/error.hpp"
#include "ens/core/rationale.hpp"

namespace ens {

// Structured description of the first expectation a text violated.
struct ParseFailure {
  ErrorCode code = ErrorCode::kParse;
  std::optional<Component> component;
  std::string message;

  std::string describe() const;
};

template <typename T>
class Result {
 public:
  Result(T value) : state_(std::move(value)) {}           // NOLINT(google-explicit-constructor)
  Result(ParseFailure failure) : state_(std::move(failure)) {}  // NOLINT

  bool ok() const { return std::holds_alternative<T>(state_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    if (!ok()) throw Error(error().code, error().describe());
    return std::get<T>(state_);
  }
  T&& value() && {
    if (!ok()) throw Error(error().code, error().describe());
    return std::get<T>(std::move(state_));
  }
  const ParseFailure& error() const { return std::get<ParseFailure>(state_); }

 private:
  std::variant<T, ParseFailure> state_;
};

}  // namespace ens
