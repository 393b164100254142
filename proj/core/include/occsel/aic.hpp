#pragma once

#include <cstdint>
#include <vector>

#include "occsel/bfgs.hpp"
#include "occsel/design.hpp"
#include "occsel/gibbs.hpp"
#include "occsel/poly_dag.hpp"
#include "occsel/survey_data.hpp"

namespace occsel {

struct MlOptions {
  int restarts = 10;  // restart 0 starts at zero, the rest standard normal
  std::uint64_t seed = 1;
  OptimOptions optim;
};

struct FitResult {
  CoefficientState coefficients;
  double loglik = 0.0;
  double aic = 0.0;  // -2 loglik + 2 (p_alpha + p_lambda)
  bool converged = false;
  bool norm_bounded = false;
};

// Maximum-likelihood fit of one model by multi-start quasi-Newton ascent of
// the observed-data likelihood. Returns the best converged restart, or the
// best overall (flagged unconverged) when none converges. `stream_index`
// keys the restart rng substream (seed, "ml-restart", stream_index, r).
FitResult ml_fit(const SurveyData& data, const DesignPair& design, const MlOptions& options,
                 std::uint64_t stream_index = 0);

struct AicRow {
  ModelId model;
  FitResult fit;
  double delta = 0.0;   // aic minus the best converged aic
  double weight = 0.0;  // exp(-delta/2), normalized over converged fits
};

struct AicSelection {
  std::vector<AicRow> rows;            // aligned with the input model list
  std::vector<double> mpip_detection;  // weight-sum inclusion probabilities
  std::vector<double> mpip_presence;
  ModelId best;  // lowest AIC among converged fits; list order breaks ties
};

// Information-criterion baseline over an explicit model list (callers decide
// whether the list honors heredity). Fits are independent, so threads only
// change wall time; model k uses restart streams (seed, "ml-restart", k, r).
AicSelection aic_selection(const SurveyData& data, const PolyDag& dag_y, const PolyDag& dag_z,
                           const std::vector<ModelId>& models, const MlOptions& options,
                           int threads);

}  // namespace occsel
