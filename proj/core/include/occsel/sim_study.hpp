#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "occsel/aic.hpp"
#include "occsel/gibbs.hpp"
#include "occsel/model_prior.hpp"
#include "occsel/poly_dag.hpp"
#include "occsel/rjmcmc.hpp"
#include "occsel/survey_data.hpp"
#include "occsel/tabular.hpp"

namespace occsel {

// Linear candidate spaces of the synthetic design: x1..x5 over sites,
// q1..q3 over surveys, intercepts base. 2^5 x 2^3 = 256 joint models.
PolyDag scenario_presence_dag();
PolyDag scenario_detection_dag();

struct ScenarioConfig {
  double p_bar = 0.5;    // target mean detection probability, in (0,1)
  double psi_bar = 0.5;  // target mean presence probability, in (0,1)
  int n_sites = 150;
  int surveys_per_site = 3;
  int n_datasets = 15;
  std::uint64_t seed = 1;
  std::uint64_t stream_index = 0;  // extra rng key, e.g. the grid cell
  // Coefficient multiplier applied after target matching; at 1 the achieved
  // mean probabilities hit the targets, larger values trade that for signal.
  double coef_scale = 1.0;
  std::uint64_t true_presence = 0b10011;  // {x1, x2, x5}
  std::uint64_t true_detection = 0b110;   // {q2, q3}
};

struct ScenarioDataset {
  SurveyData data;
  CoefficientState truth;     // coefficients of the true-model columns
  double psi_residual = 0.0;  // |achieved mean - target| at scale 1
  double p_residual = 0.0;
};

// One synthetic dataset: covariates iid standard normal, true-model
// coefficients solved so the mean response probabilities match the targets
// (best of ten quasi-Newton starts; residual past 1e-4 is an error), then
// z ~ Bern(Phi(x'alpha)) and y | z ~ Bern(z Phi(q'lambda)).
ScenarioDataset make_scenario_dataset(const ScenarioConfig& config, int dataset);
std::vector<ScenarioDataset> make_scenario(const ScenarioConfig& config);

// Per-component recovery scores with the raw counts kept alongside so other
// normalizations can be recomputed. Empty denominators score vacuously:
// no true terms -> tp = 1, no false candidates -> fp = 0.
struct SelectionScore {
  double tp = 0.0;  // |selected ∩ true| / |true|
  double fp = 0.0;  // |selected \ true| / |candidates \ true|
  int tp_count = 0;
  int fp_count = 0;
  int n_true = 0;
  int n_false = 0;
};

SelectionScore score_component(std::uint64_t selected, std::uint64_t truth, int n_candidates);

struct SelectionScorePair {
  SelectionScore detection;
  SelectionScore presence;
};

SelectionScorePair evaluate_selection(const ModelId& selected, const ModelId& truth,
                                      int n_candidates_y, int n_candidates_z);

struct GridOptions {
  std::vector<double> levels = {0.2, 0.5, 0.8};  // shared p_bar / psi_bar grid
  int n_sites = 150;
  int surveys_per_site = 3;
  int n_datasets = 15;
  std::uint64_t seed = 1;
  int threads = 1;
  double coef_scale = 1.0;
  // Bayes arm: model search, then the MPM of the renormalized posterior over
  // the full 256-model space.
  long long search_iterations = 20000;
  long long search_burn_in = 2000;
  int search_thin = 10;
  ModelPriorConfig prior;  // integrated-theta hierarchical prior by default
  // Information-criterion arm: exhaustive enumeration without heredity.
  // Fewer restarts than a standalone fit: the grid refits every model on
  // every dataset, and the low-dimensional surfaces rarely need more.
  MlOptions ml = {.restarts = 3};
};

struct GridRow {
  double p_bar = 0.0;
  double psi_bar = 0.0;
  int dataset = 0;
  std::string method;     // "bayes-mpm" or "aic-lowest"
  std::string component;  // "detection" or "presence"
  SelectionScore score;
  double runtime_seconds = 0.0;
};

// Full factorial sweep: levels^2 cells x n_datasets independent jobs, each
// scored for both methods and components. Rows are ordered (p_bar, psi_bar,
// dataset, method, component) regardless of thread count.
std::vector<GridRow> run_scenario_grid(const GridOptions& options);

struct CellSummary {
  double p_bar = 0.0;
  double psi_bar = 0.0;
  std::string method;
  std::string component;
  double mean_tp = 0.0;
  double mean_fp = 0.0;
  int n_datasets = 0;
};

std::vector<CellSummary> summarize_grid(const std::vector<GridRow>& rows);

// Scores only; wall time goes to the separate timing table so the score
// files are byte-identical across reruns of the same config and seed.
Table grid_row_table(const std::vector<GridRow>& rows);
Table grid_summary_table(const std::vector<CellSummary>& cells);
Table grid_timing_table(const std::vector<GridRow>& rows);

}  // namespace occsel
