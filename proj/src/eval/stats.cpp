#include "ens/eval/stats.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "ens/core/error.hpp"

namespace ens::eval {

namespace {

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v, double m) {
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::kDegenerateSample, "welch_t_test needs at least 2 values per sample");
  }
  const double ma = mean(a), mb = mean(b);
  const double va = sample_variance(a, ma) / static_cast<double>(a.size());
  const double vb = sample_variance(b, mb) / static_cast<double>(b.size());
  if (va + vb == 0.0) {
    if (ma == mb) return {0.0, static_cast<double>(a.size() + b.size() - 2), 1.0};
    throw Error(ErrorCode::kDegenerateSample, "both samples are constant with different means");
  }
  WelchResult r;
  r.t = (ma - mb) / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) /
         (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  boost::math::students_t dist(r.df);
  r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
  return r;
}

double fleiss_kappa(const RatingTable& table) {
  const auto& rows = table.ratings;
  if (rows.empty()) throw Error(ErrorCode::kDegenerateAgreement, "fleiss_kappa of an empty table");
  const std::size_t n = rows.front().size();
  if (n < 2) throw Error(ErrorCode::kInsufficientRaters, "fleiss_kappa needs at least 2 raters");
  std::map<int, double> category_totals;
  double p_bar = 0.0;
  for (const auto& row : rows) {
    if (row.size() != n) {
      throw Error(ErrorCode::kDegenerateAgreement, "every item needs the same number of ratings");
    }
    std::map<int, double> counts;
    for (int c : row) counts[c] += 1.0;
    double agree = 0.0;
    for (const auto& [c, k] : counts) {
      agree += k * (k - 1.0);
      category_totals[c] += k;
    }
    p_bar += agree / (static_cast<double>(n) * static_cast<double>(n - 1));
  }
  const double items = static_cast<double>(rows.size());
  p_bar /= items;
  double p_e = 0.0;
  for (const auto& [c, total] : category_totals) {
    const double pj = total / (items * static_cast<double>(n));
    p_e += pj * pj;
  }
  if (p_e >= 1.0) return 1.0;
  return (p_bar - p_e) / (1.0 - p_e);
}

}  // namespace ens::eval
