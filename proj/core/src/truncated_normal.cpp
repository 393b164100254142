#include "occsel/truncated_normal.hpp"

#include <cmath>

#include "occsel/normal.hpp"

namespace occsel {

namespace {

// Standardized lower-truncated draw: X ~ N(0,1) given X > a.
double rtnorm_std_lower(RngStream& rng, double a) {
  if (a <= 5.0) {
    // Survival-scale inverse CDF: P(X > x) is uniform on (0, Phi(-a)), which
    // stays accurate where Phi(a) itself would round to 1.
    const double tail = norm_cdf(-a);
    return -norm_quantile(tail * rng.uniform01());
  }
  // Deep truncation: shifted-exponential rejection with the optimal rate
  // lambda = (a + sqrt(a^2 + 4))/2; acceptance tends to 1 as a grows.
  const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double x = a + rng.exponential() / lambda;
    const double d = x - lambda;
    if (std::log(rng.uniform01()) <= -0.5 * d * d) return x;
  }
}

}  // namespace

double rtnorm_lower(RngStream& rng, double mean, double lower) {
  return mean + rtnorm_std_lower(rng, lower - mean);
}

double rtnorm_upper(RngStream& rng, double mean, double upper) {
  return mean - rtnorm_std_lower(rng, mean - upper);
}

}  // namespace occsel
