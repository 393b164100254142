#include "occsel/normal.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>

namespace occsel {

namespace {
constexpr double kSqrtHalf = 0.70710678118654752440;
constexpr double kLogTwoPi = 1.8378770664093454836;
}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kSqrtHalf); }

double log_norm_cdf(double x) {
  if (x >= 0.0) return std::log1p(-0.5 * std::erfc(x * kSqrtHalf));
  if (x > -37.0) return std::log(0.5 * std::erfc(-x * kSqrtHalf));
  // Mills ratio: Phi(x) ~ phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8)
  const double x2 = x * x;
  const double corr =
      1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2) + 105.0 / (x2 * x2 * x2 * x2);
  return -0.5 * x2 - 0.5 * kLogTwoPi - std::log(-x) + std::log(corr);
}

double norm_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  static const boost::math::normal_distribution<double> unit_normal(0.0, 1.0);
  return boost::math::quantile(unit_normal, p);
}

double log_norm_pdf(double x) { return -0.5 * kLogTwoPi - 0.5 * x * x; }

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = a > b ? a : b;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace occsel
