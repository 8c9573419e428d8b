#pragma once

#include <string>
#include <vector>

namespace ens::eval {

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

// Throws DegenerateSample for samples smaller than 2, or when both
// variances vanish and the means differ. Zero variances with equal means
// give t = 0, p = 1.
WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

// items x raters matrix of category labels.
struct RatingTable {
  std::string dimension;
  std::vector<std::vector<int>> ratings;
};

// Standard Fleiss formulation over the categories observed in the table.
// Every item must carry the same number (>= 2) of ratings. A table whose
// ratings all fall in one category scores 1.
double fleiss_kappa(const RatingTable& table);

}  // namespace ens::eval
