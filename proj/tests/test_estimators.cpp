#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "occsel/design.hpp"
#include "occsel/estimators.hpp"
#include "occsel/normal.hpp"
#include "occsel/poly_dag.hpp"
#include "occsel/rjmcmc.hpp"
#include "occsel/rng.hpp"
#include "occsel/survey_data.hpp"
#include "support/temp_files.hpp"

using namespace occsel;

namespace {

SurveyData simulated_data(int n, int J, double a0, double a1, double b0, std::uint64_t seed) {
  RngStream rng(seed, "est-test-data");
  Eigen::MatrixXd xs(n, 1);
  Eigen::MatrixXd qs(n * J, 0);
  std::vector<std::int8_t> y(std::size_t(n * J), 0);
  for (int i = 0; i < n; ++i) xs(i, 0) = rng.normal();
  for (int i = 0; i < n; ++i) {
    const bool z = rng.bernoulli(norm_cdf(a0 + a1 * xs(i, 0)));
    for (int j = 0; j < J; ++j)
      y[std::size_t(i * J + j)] = std::int8_t(z && rng.bernoulli(norm_cdf(b0)));
  }
  return assemble_survey_data(std::vector<int>(std::size_t(n), J), y, xs, qs, {"x"}, {});
}

SearchTrace trace_of_visits(std::vector<ModelId> visits) {
  SearchTrace trace;
  trace.visits = std::move(visits);
  trace.iterations = (long long)(trace.visits.size());
  trace.burn_in = 0;
  return trace;
}

}  // namespace

TEST_CASE("visit frequencies count the whole post-burn-in trace") {
  const ModelId a{0, 0}, b{1, 0}, c{0, 1};
  SearchTrace trace = trace_of_visits({a, a, b, a, c, b, a, a});
  const PosteriorReport report = estimate_fpe(trace, {a, b});
  CHECK(report.estimator == "fpe");
  CHECK(report.probability[0] == doctest::Approx(5.0 / 8.0).epsilon(1e-15));
  CHECK(report.probability[1] == doctest::Approx(2.0 / 8.0).epsilon(1e-15));
  // c is outside the declared list but stays in the denominator.
  CHECK(report.probability[0] + report.probability[1] < 1.0);
  CHECK(report.mc_se.size() == 2);
}

TEST_CASE("total variation handles disjoint lists") {
  const ModelId a{0, 0}, b{1, 0}, c{0, 1};
  PosteriorReport p, q;
  p.models = {a, b};
  p.probability = {0.7, 0.3};
  q.models = {b, c};
  q.probability = {0.1, 0.9};
  // union {a, b, c}: |0.7-0| + |0.3-0.1| + |0-0.9| = 1.8, halved.
  CHECK(total_variation(p, q) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(total_variation(p, p) == doctest::Approx(0.0));
}

TEST_CASE("threshold set repairs heredity upward") {
  const PolyDag dag = build_poly_dag({"x"}, 3, false);  // bits: x, x^2, x^3
  bool repaired = false;

  CHECK(mpm_mask_from_mpip({0.3, 0.7, 0.2}, dag, 0.5, &repaired) == 0b011);
  CHECK(repaired);

  CHECK(mpm_mask_from_mpip({0.6, 0.7, 0.2}, dag, 0.5, &repaired) == 0b011);
  CHECK_FALSE(repaired);

  // The threshold is inclusive.
  CHECK(mpm_mask_from_mpip({0.5, 0.1, 0.1}, dag, 0.5, &repaired) == 0b001);
  CHECK_FALSE(repaired);

  // A deep chain pulls in every ancestor.
  CHECK(mpm_mask_from_mpip({0.0, 0.0, 0.9}, dag, 0.5, &repaired) == 0b111);
  CHECK(repaired);
}

TEST_CASE("selection summary: inclusion probabilities, median model, highest model") {
  const PolyDag dag_z = build_poly_dag({"x"}, 2, false);  // bits: x, x^2
  const PolyDag dag_y = build_poly_dag({"u"}, 1, false);  // bit: u

  PosteriorReport report;
  report.estimator = "rpe";
  report.models = {ModelId{0, 0b00}, ModelId{0, 0b01}, ModelId{1, 0b01}, ModelId{1, 0b11}};
  report.probability = {0.10, 0.35, 0.35, 0.20};

  const SelectionSummary s = summarize_selection(report, dag_y, dag_z, 0.5);
  CHECK(s.mpip_presence[0] == doctest::Approx(0.90).epsilon(1e-15));
  CHECK(s.mpip_presence[1] == doctest::Approx(0.20).epsilon(1e-15));
  CHECK(s.mpip_detection[0] == doctest::Approx(0.55).epsilon(1e-15));
  CHECK(s.mpm.presence == 0b01);
  CHECK(s.mpm.detection == 0b1);
  CHECK_FALSE(s.mpm_repaired_presence);

  // HPM tie at 0.35: {x} beats {u, x} on total size.
  CHECK(s.hpm == ModelId{0, 0b01});

  // Equal-size tie: the presence bit sequence decides first, prefix before
  // extension, so {x} beats {x, x^2} even though the latter has no detection
  // term.
  PosteriorReport tie;
  tie.models = {ModelId{0, 0b11}, ModelId{1, 0b01}};
  tie.probability = {0.5, 0.5};
  const SelectionSummary t = summarize_selection(tie, dag_y, dag_z, 0.5);
  CHECK(t.hpm == ModelId{1, 0b01});
}

TEST_CASE("published duck-survey inclusion probabilities select the expected models") {
  // Candidate bits in canonical order. Presence: elev, forest, length, elev^2,
  // elev*forest, elev*length, forest^2, forest*length, length^2. Detection:
  // date, ivel, date^2, date*ivel, ivel^2.
  const PolyDag dag_z = build_poly_dag({"elev", "forest", "length"}, 2, true);
  const PolyDag dag_y = build_poly_dag({"date", "ivel"}, 2, true);
  REQUIRE(dag_z.n_candidates() == 9);
  REQUIRE(dag_y.n_candidates() == 5);
  REQUIRE(dag_z.term_name(dag_z.candidates[4]) == "elev*forest");
  REQUIRE(dag_z.term_name(dag_z.candidates[8]) == "length^2");

  const std::vector<double> epe_z{0.9966, 0.9446, 0.4305, 0.1110, 0.1297,
                                  0.2069, 0.1067, 0.2153, 0.0734};
  const std::vector<double> rpe_z{1.0000, 0.9525, 0.5998, 0.1293, 0.1448,
                                  0.3336, 0.1229, 0.3803, 0.1440};
  const std::vector<double> fpe_z{1.0000, 0.9489, 0.5983, 0.1620, 0.1732,
                                  0.3491, 0.1504, 0.4090, 0.1639};
  const std::vector<double> aic_z{1.0000, 0.9987, 0.9625, 0.3347, 0.3577,
                                  0.7561, 0.3077, 0.8737, 0.5333};
  const std::vector<double> epe_y{0.1315, 0.0538, 0.0258, 0.0012, 0.0133};
  const std::vector<double> rpe_y{0.1982, 0.1476, 0.0560, 0.0250, 0.0540};
  const std::vector<double> fpe_y{0.3846, 0.3568, 0.1119, 0.0645, 0.0980};

  bool repaired = true;
  // Exact-posterior estimator keeps elevation and forest only.
  CHECK(mpm_mask_from_mpip(epe_z, dag_z, 0.5, &repaired) ==
        dag_z.mask_of_names({"elev", "forest"}));
  CHECK_FALSE(repaired);
  // Both sampling-based estimators add the route length.
  CHECK(mpm_mask_from_mpip(rpe_z, dag_z, 0.5, &repaired) ==
        dag_z.mask_of_names({"elev", "forest", "length"}));
  CHECK_FALSE(repaired);
  CHECK(mpm_mask_from_mpip(fpe_z, dag_z, 0.5, &repaired) ==
        dag_z.mask_of_names({"elev", "forest", "length"}));
  CHECK_FALSE(repaired);
  // All detection terms stay out for every Bayesian estimator.
  for (const auto& mpip : {epe_y, rpe_y, fpe_y})
    CHECK(mpm_mask_from_mpip(mpip, dag_y, 0.5, &repaired) == 0);
  // The information-criterion weights keep two interactions and a square.
  CHECK(mpm_mask_from_mpip(aic_z, dag_z, 0.5, &repaired) ==
        dag_z.mask_of_names({"elev", "forest", "length", "elev*length", "forest*length",
                             "length^2"}));
  CHECK_FALSE(repaired);
}

TEST_CASE("default model set enumerates when it fits, otherwise grows the trace") {
  const PolyDag dag_z = build_poly_dag({"x"}, 2, false);  // strong-heredity: 3 masks
  const PolyDag dag_y = build_poly_dag({"u"}, 1, false);  // 2 masks
  SearchTrace trace = trace_of_visits({ModelId{0, 0}, ModelId{1, 1}});

  const std::vector<ModelId> full =
      default_model_set(trace, dag_y, dag_z, Heredity::kStrong, 100);
  CHECK(full.size() == 6);

  const std::vector<ModelId> grown =
      default_model_set(trace, dag_y, dag_z, Heredity::kStrong, 4);
  CHECK(grown.size() >= 2);
  CHECK(grown.size() < 6);
  for (const ModelId& m : grown) CHECK(heredity_check(dag_z, m.presence, Heredity::kStrong));
}

TEST_CASE("renormalized and exact estimators agree on a two-model space") {
  SurveyData data = simulated_data(60, 3, 0.4, 0.35, 0.8, 47);
  const PolyDag dag_z = build_poly_dag({"x"}, 1, false);
  const PolyDag dag_y = build_poly_dag({}, 1, false);
  ModelPriorConfig prior;
  prior.kind = ModelPriorKind::kUniformOverSpace;

  SearchConfig config;
  config.iterations = 40000;
  config.burn_in = 4000;
  config.thin = 5;
  config.seed = 19;
  config.prior = prior;
  ModelSearch search(data, dag_y, dag_z, prior);
  const SearchTrace trace = search.run(config);

  const std::vector<ModelId> models{ModelId{0, 0}, ModelId{0, 1}};
  const PosteriorReport fpe = estimate_fpe(trace, models);
  const PosteriorReport rpe = estimate_rpe(trace, search, models);

  ChibOptions options;
  options.rel_tol = 5e-4;
  options.max_iterations = 400000;
  const PosteriorReport epe =
      estimate_epe(data, dag_y, dag_z, models, prior, options, 3, 1);

  REQUIRE(epe.chib.size() == 2);
  CHECK(epe.chib[0].converged);
  CHECK(epe.chib[1].converged);
  CHECK(epe.probability[0] + epe.probability[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rpe.probability[0] + rpe.probability[1] == doctest::Approx(1.0).epsilon(1e-12));

  INFO("epe " << epe.probability[1] << " rpe " << rpe.probability[1] << " fpe "
              << fpe.probability[1]);
  CHECK(total_variation(rpe, epe) < 0.05);
  CHECK(total_variation(fpe, epe) < 0.06);

  // Worker count must not change the exact estimator's values.
  const PosteriorReport epe3 =
      estimate_epe(data, dag_y, dag_z, models, prior, options, 3, 3);
  CHECK(epe.probability == epe3.probability);
  CHECK(epe.mc_se == epe3.mc_se);

  // Delta-method error propagation from the per-model marginal errors.
  const double s0 = epe.chib[0].mc_se, s1 = epe.chib[1].mc_se;
  const double p1 = epe.probability[1];
  const double want =
      p1 * std::sqrt((1 - p1) * (1 - p1) * s1 * s1 + (1 - p1) * (1 - p1) * s0 * s0);
  CHECK(epe.mc_se[1] == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("posterior scores survive a file round trip") {
  const PolyDag dag_z = build_poly_dag({"x"}, 2, false);
  const PolyDag dag_y = build_poly_dag({"u"}, 1, false);
  PosteriorReport report;
  report.estimator = "rpe";
  report.models = {ModelId{0, 0b00}, ModelId{0, 0b01}, ModelId{1, 0b11}};
  report.probability = {0.25, 0.5, 0.25};
  report.mc_se = {0.01, 0.02, 0.01};

  occsel_test::TempDir dir("scores");
  const std::string path = dir.path("scores_rpe.tsv");
  write_posterior_scores(path, report, dag_y, dag_z);
  const PosteriorReport back = read_posterior_scores(path, dag_y, dag_z);
  CHECK(back.estimator == report.estimator);
  REQUIRE(back.models.size() == 3);
  CHECK(back.models == report.models);
  for (int k = 0; k < 3; ++k) {
    CHECK(back.probability[std::size_t(k)] ==
          doctest::Approx(report.probability[std::size_t(k)]).epsilon(1e-15));
    CHECK(back.mc_se[std::size_t(k)] ==
          doctest::Approx(report.mc_se[std::size_t(k)]).epsilon(1e-15));
  }
}
