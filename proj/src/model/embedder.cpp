#include "ens/model/embedder.hpp"

#include <cmath>

#include "ens/core/error.hpp"
#include "ens/core/text.hpp"

namespace ens::model {

namespace {

void l2_normalize(std::vector<double>& v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  if (n == 0.0) return;
  n = std::sqrt(n);
  for (auto& x : v) x /= n;
}

}  // namespace

HashEmbedder::HashEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw Error(ErrorCode::kDimensionMismatch, "embedder dimension must be >= 1");
}

std::vector<double> HashEmbedder::embed(std::string_view t) const {
  std::vector<double> v(dimension_, 0.0);
  for (const auto& tok : text::metric_tokens(t)) v[text::fnv1a(tok) % dimension_] += 1.0;
  l2_normalize(v);
  return v;
}

OrthogonalEmbedder::OrthogonalEmbedder(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw Error(ErrorCode::kDimensionMismatch, "embedder capacity must be >= 1");
}

std::size_t OrthogonalEmbedder::index_of(const std::string& token) const {
  std::lock_guard lock(mu_);
  auto it = vocab_.find(token);
  if (it != vocab_.end()) return it->second;
  if (vocab_.size() >= capacity_) {
    throw Error(ErrorCode::kDimensionMismatch, "orthogonal embedder vocabulary exhausted");
  }
  const std::size_t idx = vocab_.size();
  vocab_.emplace(token, idx);
  return idx;
}

std::vector<double> OrthogonalEmbedder::embed(std::string_view t) const {
  std::vector<double> v(capacity_, 0.0);
  for (const auto& tok : text::metric_tokens(t)) v[index_of(tok)] += 1.0;
  l2_normalize(v);
  return v;
}

}  // namespace ens::model
