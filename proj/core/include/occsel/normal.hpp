#pragma once

namespace occsel {

// Standard normal CDF. Underflows to 0 below ~ -38.
double norm_cdf(double x);

// log Phi(x), finite for every finite x. erfc carries the result down to
// x = -37; past that an asymptotic Mills-ratio expansion takes over, so the
// linear predictors the samplers produce (|x| <= 30 and well beyond) never
// hit -inf.
double log_norm_cdf(double x);

// Phi^{-1}(p) for p in (0,1); +-inf at the endpoints.
double norm_quantile(double p);

double log_norm_pdf(double x);

// log(exp(a) + exp(b)) without overflow.
double log_sum_exp(double a, double b);

}  // namespace occsel
