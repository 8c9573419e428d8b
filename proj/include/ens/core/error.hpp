#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ens {

enum class ErrorCode {
  kMissingComponent,
  kTagStructure,
  kLeadIn,
  kCatalog,
  kMask,
  kTurnOrder,
  kInvariant,
  kSchema,
  kClient,
  kEmptyGeneration,
  kParse,
  kMissingRating,
  kRatio,
  kZeroVector,
  kDimensionMismatch,
  kEmptyTarget,
  kEmptyBatch,
  kBackend,
  kLengthMismatch,
  kDegenerateSample,
  kDegenerateAgreement,
  kGenerationUnparseable,
  kUnknownPolicy,
  kUnknownSession,
  kUnknownScenario,
  kAlreadyClosed,
  kSessionOpen,
  kScoreOutOfRange,
  kInsufficientRaters,
  kConfig,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ens
