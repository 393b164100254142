#pragma once

#include "occsel/gibbs.hpp"

namespace occsel {

struct ChibOptions {
  double rel_tol = 0.01;  // stop when the 95% CI halfwidth of the log-marginal
                          // estimate drops under rel_tol * |log marginal|
  long long max_iterations = 1000000;  // ordinate-phase cap
  long long burn_in = 2000;
  long long pilot = 2000;  // draws averaged into the evaluation point
  double base_ridge = 0.0;
};

struct ChibEstimate {
  double log_marginal = 0.0;
  double mc_se = 0.0;  // batch-means Monte Carlo error of the log ordinate
  long long iterations_used = 0;
  bool converged = false;
  double log_ordinate = 0.0;
  double loglik_at_point = 0.0;
  double log_prior_at_point = 0.0;
  CoefficientState point;
};

// Candidate's identity at the pilot posterior mean theta*:
//   log m(y) = loglik(theta*) + log pi(theta*) - log p(theta* | y),
// the ordinate Rao-Blackwellized over the latent draws of a continued chain.
// The coefficient blocks are conditionally independent given (v, w), so a
// single ordinate run suffices. The batch-means standard error uses
// sqrt(iterations) batches; sampling extends until the stopping rule or cap.
ChibEstimate chib_log_marginal(const SurveyData& data, const DesignPair& design,
                               const ChibOptions& options, RngStream& rng);

// Batch-means standard error of the mean of a (possibly autocorrelated)
// scalar chain, with floor(sqrt(T)) batches.
double batch_means_se(const std::vector<double>& chain);

// Mean and standard error of log(mean(exp(o_t))) for a log-scale chain,
// overflow-safe; the SE follows by the delta method.
void log_mean_exp_with_se(const std::vector<double>& log_values, double* log_mean, double* se);

}  // namespace occsel
