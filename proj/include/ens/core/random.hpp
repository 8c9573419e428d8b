#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ens::rng {

// mt19937_64 output is fully specified by the standard; the helpers below
// avoid std distributions so sequences match across standard libraries.

inline double unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline double gaussian(std::mt19937_64& g) {
  double u1 = unit(g);
  const double u2 = unit(g);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Uniform integer in [0, n).
inline std::uint64_t below(std::mt19937_64& g, std::uint64_t n) {
  return static_cast<std::uint64_t>(unit(g) * static_cast<double>(n));
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& g) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(below(g, i));
    using std::swap;
    swap(v[i - 1], v[j]);
  }
}

}  // namespace ens::rng
