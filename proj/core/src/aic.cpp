#include "occsel/aic.hpp"

#include <cmath>
#include <limits>

#include "occsel/errors.hpp"
#include "occsel/parallel.hpp"
#include "occsel/rng.hpp"

namespace occsel {

FitResult ml_fit(const SurveyData& data, const DesignPair& design, const MlOptions& options,
                 std::uint64_t stream_index) {
  if (options.restarts < 1) throw ConfigError("ml_fit needs at least one restart");
  const int p_alpha = design.p_alpha();
  const int p_lambda = design.p_lambda();
  const int dim = p_alpha + p_lambda;
  const auto objective = [&](const Eigen::VectorXd& theta) {
    CoefficientState coeffs;
    coeffs.alpha = theta.head(p_alpha);
    coeffs.lambda = theta.tail(p_lambda);
    return observed_data_loglik(data, design, coeffs);
  };

  FitResult best;
  bool have_any = false;
  for (int r = 0; r < options.restarts; ++r) {
    Eigen::VectorXd start = Eigen::VectorXd::Zero(dim);
    if (r > 0) {
      RngStream rng(options.seed, "ml-restart", stream_index, std::uint64_t(r));
      for (int j = 0; j < dim; ++j) start[j] = rng.normal();
    }
    const OptimResult opt = maximize(objective, start, options.optim);
    FitResult fit;
    fit.coefficients.alpha = opt.x.head(p_alpha);
    fit.coefficients.lambda = opt.x.tail(p_lambda);
    fit.loglik = opt.value;
    fit.aic = -2.0 * opt.value + 2.0 * dim;
    fit.converged = opt.converged;
    fit.norm_bounded = opt.norm_bounded;
    const bool upgrade = fit.converged && !best.converged;
    const bool comparable = fit.converged == best.converged;
    if (!have_any || upgrade || (comparable && fit.loglik > best.loglik)) {
      best = fit;
      have_any = true;
    }
  }
  return best;
}

AicSelection aic_selection(const SurveyData& data, const PolyDag& dag_y, const PolyDag& dag_z,
                           const std::vector<ModelId>& models, const MlOptions& options,
                           int threads) {
  if (models.empty()) throw ConfigError("empty model list");
  AicSelection out;
  out.rows.resize(models.size());
  parallel_for(std::int64_t(models.size()), threads, [&](std::int64_t k) {
    const DesignPair design = build_model_design(data, dag_z, dag_y, models[std::size_t(k)]);
    out.rows[std::size_t(k)].model = models[std::size_t(k)];
    out.rows[std::size_t(k)].fit = ml_fit(data, design, options, std::uint64_t(k));
  });

  double best_aic = std::numeric_limits<double>::infinity();
  std::size_t best_index = models.size();
  for (std::size_t k = 0; k < models.size(); ++k) {
    if (!out.rows[k].fit.converged) continue;
    if (out.rows[k].fit.aic < best_aic) {
      best_aic = out.rows[k].fit.aic;
      best_index = k;
    }
  }
  if (best_index == models.size())
    throw NumericalError("no model fit converged; cannot form information weights");
  out.best = models[best_index];

  double norm = 0.0;
  for (AicRow& row : out.rows) {
    row.delta = row.fit.aic - best_aic;
    row.weight = row.fit.converged ? std::exp(-0.5 * row.delta) : 0.0;
    norm += row.weight;
  }
  for (AicRow& row : out.rows) row.weight /= norm;

  out.mpip_detection.assign(std::size_t(dag_y.n_candidates()), 0.0);
  out.mpip_presence.assign(std::size_t(dag_z.n_candidates()), 0.0);
  for (const AicRow& row : out.rows) {
    for (int b = 0; b < dag_y.n_candidates(); ++b)
      if (row.model.detection >> b & 1) out.mpip_detection[std::size_t(b)] += row.weight;
    for (int b = 0; b < dag_z.n_candidates(); ++b)
      if (row.model.presence >> b & 1) out.mpip_presence[std::size_t(b)] += row.weight;
  }
  return out;
}

}  // namespace occsel
