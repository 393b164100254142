#include "occsel/chib.hpp"

#include <algorithm>
#include <cmath>

#include "occsel/component.hpp"
#include "occsel/errors.hpp"

namespace occsel {

double batch_means_se(const std::vector<double>& chain) {
  const long long t = (long long)(chain.size());
  const long long n_batches = std::max(2LL, (long long)(std::sqrt(double(t))));
  const long long batch = t / n_batches;
  if (batch < 1) return 0.0;
  const long long used = n_batches * batch;
  double grand = 0.0;
  for (long long i = 0; i < used; ++i) grand += chain[i];
  grand /= double(used);
  double ss = 0.0;
  for (long long b = 0; b < n_batches; ++b) {
    double m = 0.0;
    for (long long i = b * batch; i < (b + 1) * batch; ++i) m += chain[i];
    m /= double(batch);
    ss += (m - grand) * (m - grand);
  }
  const double var_mean = batch * ss / double(n_batches - 1) / double(used);
  return std::sqrt(var_mean);
}

void log_mean_exp_with_se(const std::vector<double>& log_values, double* log_mean, double* se) {
  const double top = *std::max_element(log_values.begin(), log_values.end());
  std::vector<double> rel(log_values.size());
  for (std::size_t i = 0; i < log_values.size(); ++i) rel[i] = std::exp(log_values[i] - top);
  double mean = 0.0;
  for (double r : rel) mean += r;
  mean /= double(rel.size());
  *log_mean = top + std::log(mean);
  // Var(log m) ~ Var(m)/m^2 with Var(m) from batch means on the linear scale.
  *se = batch_means_se(rel) / mean;
}

ChibEstimate chib_log_marginal(const SurveyData& data, const DesignPair& design,
                               const ChibOptions& options, RngStream& rng) {
  SingleModelSampler sampler(data, design, options.base_ridge);
  sampler.initialize(rng);
  for (long long t = 0; t < options.burn_in; ++t) sampler.sweep(rng);

  ChibEstimate est;
  est.point.alpha = Eigen::VectorXd::Zero(design.X.cols());
  est.point.lambda = Eigen::VectorXd::Zero(design.Q.cols());
  for (long long t = 0; t < options.pilot; ++t) {
    sampler.sweep(rng);
    est.point.alpha += sampler.coefficients().alpha;
    est.point.lambda += sampler.coefficients().lambda;
  }
  est.point.alpha /= double(options.pilot);
  est.point.lambda /= double(options.pilot);

  est.loglik_at_point = sampler.loglik(est.point);

  // Intrinsic prior ordinate: proper normal factors for the non-base blocks
  // (flat base contributes nothing unless the ridge seam is on).
  {
    std::vector<std::string> xn, qn;
    for (int j = 0; j < design.X.cols(); ++j) xn.push_back("x" + std::to_string(j + 1));
    for (int j = 0; j < design.Q.cols(); ++j) qn.push_back("q" + std::to_string(j + 1));
    ComponentWorkspace ws_z(design.X, design.p_base_z, xn);
    ComponentWorkspace ws_y(design.Q, design.p_base_y, qn);
    const std::uint64_t full_z = (std::uint64_t(1) << ws_z.n_candidates()) - 1;
    const std::uint64_t full_y = (std::uint64_t(1) << ws_y.n_candidates()) - 1;
    est.log_prior_at_point =
        ws_z.log_intrinsic_prior(est.point.alpha.tail(ws_z.n_candidates()), full_z) +
        ws_y.log_intrinsic_prior(est.point.lambda.tail(ws_y.n_candidates()), full_y) +
        sampler.presence_block().log_ridge_prior(est.point.alpha) +
        sampler.detection_block().log_ridge_prior(est.point.lambda);
  }

  std::vector<double> ordinates;
  ordinates.reserve(8192);
  long long next_check = 1000;
  while ((long long)(ordinates.size()) < options.max_iterations) {
    sampler.sweep(rng);
    ordinates.push_back(sampler.log_coefficient_ordinate(est.point));
    if ((long long)(ordinates.size()) >= next_check) {
      log_mean_exp_with_se(ordinates, &est.log_ordinate, &est.mc_se);
      const double running =
          est.loglik_at_point + est.log_prior_at_point - est.log_ordinate;
      if (1.96 * est.mc_se < options.rel_tol * std::fabs(running)) {
        est.converged = true;
        break;
      }
      next_check = std::max(next_check + 1, (long long)(double(next_check) * 1.6));
    }
  }
  if (!est.converged) log_mean_exp_with_se(ordinates, &est.log_ordinate, &est.mc_se);
  est.iterations_used = (long long)(ordinates.size());
  est.log_marginal = est.loglik_at_point + est.log_prior_at_point - est.log_ordinate;
  return est;
}

}  // namespace occsel
