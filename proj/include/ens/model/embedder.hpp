#pragma once

#include <mutex>
#include <string>
#include <unordered_map>

#include "ens/model/backend.hpp"

namespace ens::model {

// Token counts hashed into `dimension` buckets, L2-normalized.
class HashEmbedder final : public Embedder {
 public:
  explicit HashEmbedder(std::size_t dimension = 64);

  std::size_t dimension() const override { return dimension_; }
  std::vector<double> embed(std::string_view text) const override;

 private:
  std::size_t dimension_;
};

// Gives every distinct token its own axis, so texts with disjoint
// vocabularies embed orthogonally. Throws once `capacity` tokens are used.
class OrthogonalEmbedder final : public Embedder {
 public:
  explicit OrthogonalEmbedder(std::size_t capacity = 8192);

  std::size_t dimension() const override { return capacity_; }
  std::vector<double> embed(std::string_view text) const override;

 private:
  std::size_t index_of(const std::string& token) const;

  std::size_t capacity_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, std::size_t> vocab_;
};

}  // namespace ens::model
