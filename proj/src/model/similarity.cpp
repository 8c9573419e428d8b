#include "ens/model/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "ens/core/error.hpp"
#include "ens/core/tagged.hpp"

namespace ens::model {

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size() || u.empty()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cosine similarity of vectors with sizes " + std::to_string(u.size()) + " and " +
                    std::to_string(v.size()));
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw Error(ErrorCode::kZeroVector, "cosine similarity of a zero vector");
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

SequenceScore sequence_logprob(const GenerativeBackend& backend, std::string_view prompt,
                               std::string_view target) {
  SequenceScore s;
  s.token_logprobs = backend.score(prompt, target);
  if (s.token_logprobs.empty()) throw Error(ErrorCode::kEmptyTarget, "target has no tokens");
  for (double lp : s.token_logprobs) s.total += lp;
  return s;
}

std::optional<double> response_similarity(std::string_view completion, std::string_view reference,
                                          const Embedder& embedder, AblationMask mask) {
  auto parsed = parse_tagged_target(completion, mask);
  if (!parsed) return std::nullopt;
  const auto a = embedder.embed(parsed.value().response);
  const auto b = embedder.embed(reference);
  return cosine_similarity(a, b);
}

}  // namespace ens::model
