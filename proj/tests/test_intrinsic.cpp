#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "occsel/component.hpp"
#include "occsel/errors.hpp"
#include "occsel/intrinsic.hpp"
#include "occsel/model_prior.hpp"
#include "occsel/normal.hpp"
#include "occsel/poly_dag.hpp"
#include "support/marginal_oracle.hpp"

using namespace occsel;
using occsel_test::MarginalInstance;
using occsel_test::oracle_log_marginal;
using occsel_test::oracle_prior_covariance;
using occsel_test::random_marginal_instance;

TEST_CASE("prior covariance matches the scalar reduction") {
  // X0 = 1_4, x_a = (1,2,3,4)': Schur = centered sum of squares = 5, total
  // dimension p = 2, so the covariance is (2n/p)/Schur = (8/2)/5 = 0.8.
  Eigen::MatrixXd design(4, 2);
  design << 1, 1, 1, 2, 1, 3, 1, 4;
  IntrinsicGram gram = make_intrinsic_gram(design, 1);
  CHECK(gram.sample_size == 4);
  CHECK(gram.total_dim == 2);
  CHECK(gram.schur(0, 0) == doctest::Approx(5.0).epsilon(1e-12));
  Eigen::MatrixXd cov = intrinsic_prior_covariance(gram);
  REQUIRE(cov.rows() == 1);
  CHECK(cov(0, 0) == doctest::Approx(2.0 * 4.0 / (2.0 * 5.0)).epsilon(1e-12));
}

TEST_CASE("prior covariance equals the dense-projector construction") {
  std::mt19937 gen(21);
  for (int rep = 0; rep < 10; ++rep) {
    MarginalInstance inst = random_marginal_instance(gen, 6, rep % 2 + 1, rep % 2 + 1);
    IntrinsicGram gram = make_intrinsic_gram(inst.design, inst.p0);
    Eigen::MatrixXd a = intrinsic_prior_covariance(gram);
    Eigen::MatrixXd b = oracle_prior_covariance(inst.design, inst.p0);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("base-only marginal has its closed form") {
  // n = 2, X0 = 1_2, v = 0: log m = -(1/2) log 2pi - (1/2) log 2.
  Eigen::MatrixXd design = Eigen::MatrixXd::Ones(2, 1);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(2);
  CHECK(log_latent_marginal(v, design, 1) ==
        doctest::Approx(-0.5 * std::log(2.0 * M_PI) - 0.5 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("closed-form marginal matches adaptive quadrature") {
  std::mt19937 gen(1234);
  struct Shape {
    int n, p0, pa;
  };
  std::vector<Shape> shapes = {{3, 1, 0}, {4, 1, 1}, {5, 1, 2}, {6, 2, 1},
                               {4, 2, 0}, {6, 1, 2}, {5, 2, 2}, {6, 2, 2}};
  for (const Shape& s : shapes) {
    MarginalInstance inst = random_marginal_instance(gen, s.n, s.p0, s.pa);
    double closed = log_latent_marginal(inst.v, inst.design, inst.p0);
    double oracle = oracle_log_marginal(inst);
    INFO("n=", s.n, " p0=", s.p0, " pa=", s.pa);
    CHECK(std::abs(closed - oracle) < 1e-6);
  }
}

TEST_CASE("marginal is invariant to shifts along the base span") {
  std::mt19937 gen(77);
  MarginalInstance inst = random_marginal_instance(gen, 6, 2, 2);
  double before = log_latent_marginal(inst.v, inst.design, inst.p0);
  Eigen::VectorXd b(2);
  b << 3.25, -1.5;
  Eigen::VectorXd shifted = inst.v + inst.design.leftCols(2) * b;
  CHECK(log_latent_marginal(shifted, inst.design, inst.p0) ==
        doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("marginal is invariant to reparameterizing the candidate block") {
  std::mt19937 gen(78);
  MarginalInstance inst = random_marginal_instance(gen, 6, 1, 2);
  double before = log_latent_marginal(inst.v, inst.design, inst.p0);
  Eigen::MatrixXd r(2, 2);
  r << 2.0, -0.7, 0.3, 1.1;  // invertible
  Eigen::MatrixXd redesign = inst.design;
  redesign.rightCols(2) = inst.design.rightCols(2) * r;
  CHECK(log_latent_marginal(inst.v, redesign, inst.p0) ==
        doctest::Approx(before).epsilon(1e-11));
}

TEST_CASE("workspace subset scores agree with the standalone marginal") {
  std::mt19937 gen(90);
  std::normal_distribution<double> nd;
  int n = 30, p0 = 1, k = 4;
  Eigen::MatrixXd full(n, p0 + k);
  full.col(0).setOnes();
  for (int c = 1; c < p0 + k; ++c)
    for (int r = 0; r < n; ++r) full(r, c) = nd(gen);
  Eigen::VectorXd v(n);
  for (int r = 0; r < n; ++r) v(r) = nd(gen) * 2.0;

  ComponentWorkspace ws(full, p0, {"1", "c1", "c2", "c3", "c4"});
  auto proj = ws.project(v);
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << k); ++mask) {
    Eigen::MatrixXd sub = ws.gather_columns(mask);
    double direct = log_latent_marginal(v, sub, p0);
    CHECK(ws.log_marginal(proj, mask) == doctest::Approx(direct).epsilon(1e-11));
    CHECK(ws.log_marginal(v, mask) == doctest::Approx(direct).epsilon(1e-11));
  }
}

TEST_CASE("workspace intrinsic prior density matches a direct gaussian") {
  std::mt19937 gen(91);
  std::normal_distribution<double> nd;
  int n = 25, p0 = 2, k = 3;
  Eigen::MatrixXd full(n, p0 + k);
  full.col(0).setOnes();
  for (int c = 1; c < p0 + k; ++c)
    for (int r = 0; r < n; ++r) full(r, c) = nd(gen);
  ComponentWorkspace ws(full, p0, {"1", "b", "c1", "c2", "c3"});

  std::uint64_t mask = 0b101;  // c1, c3
  Eigen::MatrixXd sub = ws.gather_columns(mask);
  IntrinsicGram gram = make_intrinsic_gram(sub, p0);
  Eigen::MatrixXd cov = intrinsic_prior_covariance(gram);
  Eigen::VectorXd coef(2);
  coef << 0.4, -1.7;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  double log_det = 2.0 * std::log(llt.matrixLLT()(0, 0)) + 2.0 * std::log(llt.matrixLLT()(1, 1));
  double quad = llt.matrixL().solve(coef).squaredNorm();
  double direct = -std::log(2.0 * M_PI) - 0.5 * log_det - 0.5 * quad;
  CHECK(ws.log_intrinsic_prior(coef, mask) == doctest::Approx(direct).epsilon(1e-11));
  CHECK(ws.log_intrinsic_prior(Eigen::VectorXd(), 0) == 0.0);
}

TEST_CASE("collinear candidate subsets raise a numerical error") {
  int n = 12;
  Eigen::MatrixXd full(n, 3);
  full.col(0).setOnes();
  for (int r = 0; r < n; ++r) full(r, 1) = r;
  full.col(2) = full.col(1);  // duplicate candidate
  ComponentWorkspace ws(full, 1, {"1", "a", "a-copy"});
  CHECK_THROWS_AS((void)ws.factors(0b11), NumericalError);
  // Individually each candidate is fine.
  CHECK_NOTHROW((void)ws.factors(0b01));
  CHECK_NOTHROW((void)ws.factors(0b10));
}

TEST_CASE("latent model posterior normalizes and concentrates") {
  std::mt19937 gen(92);
  std::normal_distribution<double> nd;
  int n = 60, j_total = 120;
  Eigen::MatrixXd xz(n, 3), xy(j_total, 2);
  xz.col(0).setOnes();
  xy.col(0).setOnes();
  for (int r = 0; r < n; ++r) {
    xz(r, 1) = nd(gen);
    xz(r, 2) = nd(gen);
  }
  for (int r = 0; r < j_total; ++r) xy(r, 1) = nd(gen);

  ComponentWorkspace ws_z(xz, 1, {"1", "a", "b"});
  ComponentWorkspace ws_y(xy, 1, {"1", "d"});
  PolyDag dag_z = build_poly_dag({"a", "b"}, 1, false);
  PolyDag dag_y = build_poly_dag({"d"}, 1, false);
  ModelPrior prior(dag_y, dag_z, ModelPriorConfig{});
  auto models = enumerate_models(dag_y, dag_z, Heredity::kStrong);
  REQUIRE(models.size() == 8);

  // Unstructured latents: posterior sums to one.
  Eigen::VectorXd v(n), w(j_total);
  for (int r = 0; r < n; ++r) v(r) = nd(gen);
  for (int r = 0; r < j_total; ++r) w(r) = nd(gen);
  auto probs = latent_model_posterior(v, w, ws_z, ws_y, models, prior);
  double total = 0.0;
  for (double p : probs) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  // Single-model list is a delta.
  auto single = latent_model_posterior(v, w, ws_z, ws_y, {models[0]}, prior);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == doctest::Approx(1.0));

  // A strong signal on covariate "a" concentrates on models containing it.
  Eigen::VectorXd strong = 12.0 * xz.col(1);
  auto conc = latent_model_posterior(strong, w, ws_z, ws_y, models, prior);
  double with_a = 0.0;
  std::uint64_t bit_a = dag_z.mask_of_names({"a"});
  for (std::size_t k = 0; k < models.size(); ++k)
    if (models[k].presence & bit_a) with_a += conc[k];
  CHECK(with_a > 0.99);
}
