#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "occsel/chib.hpp"
#include "occsel/design.hpp"
#include "occsel/gibbs.hpp"
#include "occsel/poly_dag.hpp"
#include "occsel/rng.hpp"
#include "occsel/survey_data.hpp"
#include "support/quadrature.hpp"

using namespace occsel;

namespace {

// Marginal likelihood under the proper prior (ridge on the base blocks,
// intrinsic normal on the candidate blocks) by prior-whitened tensor
// quadrature. Works in the sampler's parametrization, so the whitening map is
// diagonal by blocks.
double quadrature_log_marginal(const SurveyData& data, const DesignPair& design, double ridge,
                               double rel_tol = 1e-6) {
  const ComponentCoefSampler cs_z(design.X, design.p_base_z, ridge);
  const ComponentCoefSampler cs_y(design.Q, design.p_base_y, ridge);
  const int dz = cs_z.p0 + cs_z.pa;
  const int dy = cs_y.p0 + cs_y.pa;
  const int dim = dz + dy;

  auto unwhiten = [&](const ComponentCoefSampler& cs, const double* u) {
    Eigen::VectorXd coef(cs.p0 + cs.pa);
    for (int j = 0; j < cs.p0; ++j) coef[j] = u[j] / std::sqrt(ridge);
    if (cs.pa > 0) {
      const double g = cs.shrink / (1.0 - cs.shrink);
      Eigen::VectorXd eta(cs.pa);
      for (int j = 0; j < cs.pa; ++j) eta[j] = u[cs.p0 + j];
      coef.tail(cs.pa) = std::sqrt(g) * cs.llta.matrixU().solve(eta);
    }
    return coef;
  };

  const double log_norm = -0.5 * dim * std::log(2.0 * M_PI);
  const double value = occsel_test::integrate_whitened(
      [&](const std::vector<double>& u) {
        const Eigen::VectorXd alpha = unwhiten(cs_z, u.data());
        const Eigen::VectorXd lambda = unwhiten(cs_y, u.data() + dz);
        double quad = 0.0;
        for (double ui : u) quad += ui * ui;
        const double ll = observed_data_loglik_lp(data, cs_z.linear_predictor(alpha),
                                                  cs_y.linear_predictor(lambda));
        return std::exp(ll + log_norm - 0.5 * quad);
      },
      dim, rel_tol);
  return std::log(value);
}

SurveyData intercept_data(int n, int J, const std::vector<std::int8_t>& y) {
  return assemble_survey_data(std::vector<int>(std::size_t(n), J), y,
                              Eigen::MatrixXd::Zero(n, 0), Eigen::MatrixXd::Zero(n * J, 0), {},
                              {});
}

}  // namespace

TEST_CASE("batch-means error matches the iid rate") {
  RngStream rng(4, "bm");
  std::vector<double> chain;
  for (int t = 0; t < 20000; ++t) chain.push_back(1.5 + 0.7 * rng.normal());
  const double se = batch_means_se(chain);
  const double iid = 0.7 / std::sqrt(20000.0);
  CHECK(se > 0.75 * iid);
  CHECK(se < 1.3 * iid);
}

TEST_CASE("log-mean-exp of a constant chain is the constant with zero error") {
  std::vector<double> chain(500, -3.25);
  double log_mean = 0.0, se = 1.0;
  log_mean_exp_with_se(chain, &log_mean, &se);
  CHECK(log_mean == doctest::Approx(-3.25).epsilon(1e-14));
  CHECK(se == doctest::Approx(0.0));
}

TEST_CASE("marginal likelihood matches quadrature on intercept-only data") {
  const std::vector<std::int8_t> y{1, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 0};
  SurveyData data = intercept_data(6, 2, y);
  const PolyDag dag = build_poly_dag({}, 1, false);
  const DesignPair design = build_model_design(data, dag, dag, {0, 0}, false);

  const double quad = quadrature_log_marginal(data, design, 1.0);

  ChibOptions options;
  options.base_ridge = 1.0;
  options.rel_tol = 0.002;
  options.burn_in = 2000;
  options.pilot = 2000;
  options.max_iterations = 400000;
  RngStream rng(17, "chib-test");
  const ChibEstimate est = chib_log_marginal(data, design, options, rng);
  INFO("quad " << quad << " chib " << est.log_marginal << " se " << est.mc_se);
  CHECK(est.converged);
  CHECK(std::fabs(est.log_marginal - quad) < std::max(4.0 * est.mc_se, 0.02));
}

TEST_CASE("marginal likelihood matches quadrature with candidate terms") {
  std::mt19937 gen(88);
  std::normal_distribution<double> nd;
  const int n = 6, J = 2;
  Eigen::MatrixXd xs(n, 1), qs(n * J, 1);
  for (int i = 0; i < n; ++i) xs(i, 0) = nd(gen);
  for (int r = 0; r < n * J; ++r) qs(r, 0) = nd(gen);
  const std::vector<std::int8_t> y{1, 0, 0, 0, 0, 1, 1, 1, 0, 0, 0, 0};
  SurveyData data =
      assemble_survey_data(std::vector<int>(std::size_t(n), J), y, xs, qs, {"x"}, {"u"});
  const PolyDag dag_z = build_poly_dag({"x"}, 1, false);
  const PolyDag dag_y = build_poly_dag({"u"}, 1, false);
  const DesignPair design = build_model_design(data, dag_z, dag_y, {1, 1}, true);

  const double quad = quadrature_log_marginal(data, design, 1.0);

  ChibOptions options;
  options.base_ridge = 1.0;
  options.rel_tol = 0.002;
  options.burn_in = 2000;
  options.pilot = 2000;
  options.max_iterations = 400000;
  RngStream rng(29, "chib-test");
  const ChibEstimate est = chib_log_marginal(data, design, options, rng);
  INFO("quad " << quad << " chib " << est.log_marginal << " se " << est.mc_se);
  CHECK(est.converged);
  CHECK(std::fabs(est.log_marginal - quad) < std::max(4.0 * est.mc_se, 0.03));
}

TEST_CASE("marginals over every dataset sum to one") {
  // Two sites, one survey each: four observable datasets. The quadrature
  // marginals must normalize exactly; the sampler-based ones within Monte
  // Carlo error.
  const PolyDag dag = build_poly_dag({}, 1, false);
  double quad_sum = 0.0;
  double chib_sum = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      SurveyData data = intercept_data(2, 1, {std::int8_t(a), std::int8_t(b)});
      const DesignPair design = build_model_design(data, dag, dag, {0, 0}, false);
      quad_sum += std::exp(quadrature_log_marginal(data, design, 1.0));
      ChibOptions options;
      options.base_ridge = 1.0;
      options.rel_tol = 0.002;
      options.max_iterations = 400000;
      RngStream rng(5, "chib-sum", std::uint64_t(2 * a + b));
      chib_sum += std::exp(chib_log_marginal(data, design, options, rng).log_marginal);
    }
  CHECK(quad_sum == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(chib_sum == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("stopping rule and determinism") {
  const std::vector<std::int8_t> y{1, 0, 0, 1, 0, 0, 0, 0};
  SurveyData data = intercept_data(4, 2, y);
  const PolyDag dag = build_poly_dag({}, 1, false);
  const DesignPair design = build_model_design(data, dag, dag, {0, 0}, false);

  ChibOptions options;
  options.base_ridge = 0.0;  // production prior
  options.rel_tol = 0.01;
  options.max_iterations = 200000;

  RngStream r1(9, "chib-det");
  RngStream r2(9, "chib-det");
  const ChibEstimate a = chib_log_marginal(data, design, options, r1);
  const ChibEstimate b = chib_log_marginal(data, design, options, r2);
  CHECK(a.log_marginal == b.log_marginal);
  CHECK(a.iterations_used == b.iterations_used);
  CHECK(a.converged == b.converged);
  if (a.converged) CHECK(1.96 * a.mc_se < options.rel_tol * std::fabs(a.log_marginal));

  // An unreachable tolerance must be reported, not silently accepted.
  options.rel_tol = 1e-9;
  options.max_iterations = 3000;
  RngStream r3(9, "chib-det");
  const ChibEstimate c = chib_log_marginal(data, design, options, r3);
  CHECK_FALSE(c.converged);
  CHECK(c.iterations_used == 3000);
}
