#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ens/core/rationale.hpp"
#include "ens/model/backend.hpp"

namespace ens::model {

// u.v / (|u||v|). Throws DimensionMismatch or ZeroVector.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

struct SequenceScore {
  std::vector<double> token_logprobs;
  double total = 0.0;
};

// Throws EmptyTarget when the target has no tokens.
SequenceScore sequence_logprob(const GenerativeBackend& backend, std::string_view prompt,
                               std::string_view target);

// Cosine similarity between the completion's answer span and the reference.
// nullopt is the "unparseable" sentinel: the completion did not parse as a
// tagged target under `mask`.
std::optional<double> response_similarity(std::string_view completion, std::string_view reference,
                                          const Embedder& embedder,
                                          AblationMask mask = AblationMask::full());

}  // namespace ens::model
