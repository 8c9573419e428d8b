#include "ens/core/error.hpp"

namespace ens {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingComponent: return "MissingComponent";
    case ErrorCode::kTagStructure: return "TagStructureError";
    case ErrorCode::kLeadIn: return "LeadInError";
    case ErrorCode::kCatalog: return "CatalogError";
    case ErrorCode::kMask: return "MaskError";
    case ErrorCode::kTurnOrder: return "TurnOrderError";
    case ErrorCode::kInvariant: return "InvariantViolation";
    case ErrorCode::kSchema: return "SchemaError";
    case ErrorCode::kClient: return "ClientError";
    case ErrorCode::kEmptyGeneration: return "EmptyGeneration";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kMissingRating: return "MissingRating";
    case ErrorCode::kRatio: return "RatioError";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyTarget: return "EmptyTarget";
    case ErrorCode::kEmptyBatch: return "EmptyBatch";
    case ErrorCode::kBackend: return "BackendError";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDegenerateSample: return "DegenerateSample";
    case ErrorCode::kDegenerateAgreement: return "DegenerateAgreement";
    case ErrorCode::kGenerationUnparseable: return "GenerationUnparseable";
    case ErrorCode::kUnknownPolicy: return "UnknownPolicy";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kUnknownScenario: return "UnknownScenario";
    case ErrorCode::kAlreadyClosed: return "AlreadyClosed";
    case ErrorCode::kSessionOpen: return "SessionOpen";
    case ErrorCode::kScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::kInsufficientRaters: return "InsufficientRaters";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace ens
