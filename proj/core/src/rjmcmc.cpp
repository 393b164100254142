#include "occsel/rjmcmc.hpp"

#include <cmath>
#include <limits>

#include "occsel/errors.hpp"
#include "occsel/normal.hpp"

namespace occsel {

namespace {

std::vector<std::string> workspace_names(const PolyDag& dag, const std::vector<int>& terms) {
  std::vector<std::string> names;
  names.reserve(terms.size());
  for (int t : terms) names.push_back(dag.term_name(t));
  return names;
}

}  // namespace

ModelSearch::ModelSearch(const SurveyData& data, const PolyDag& dag_y, const PolyDag& dag_z,
                         const ModelPriorConfig& prior_config, bool standardize)
    : data_(data), dag_y_(dag_y), dag_z_(dag_z), prior_(dag_y, dag_z, prior_config) {
  const std::uint64_t full_z = dag_z_.n_candidates() == 0
                                   ? 0
                                   : (std::uint64_t(1) << dag_z_.n_candidates()) - 1;
  const std::uint64_t full_y = dag_y_.n_candidates() == 0
                                   ? 0
                                   : (std::uint64_t(1) << dag_y_.n_candidates()) - 1;
  std::vector<int> terms_z, terms_y;
  Eigen::MatrixXd x_full = build_component_design(data_.site_covariates,
                                                  data_.site_covariate_names, dag_z_, full_z,
                                                  standardize, &terms_z);
  Eigen::MatrixXd q_full = build_component_design(data_.survey_covariates,
                                                  data_.survey_covariate_names, dag_y_, full_y,
                                                  standardize, &terms_y);
  ws_z_ = std::make_unique<ComponentWorkspace>(std::move(x_full), int(dag_z_.base.size()),
                                               workspace_names(dag_z_, terms_z));
  ws_y_ = std::make_unique<ComponentWorkspace>(std::move(q_full), int(dag_y_.base.size()),
                                               workspace_names(dag_y_, terms_y));
}

const ModelSearch::ComponentModel& ModelSearch::component_model(bool presence,
                                                                std::uint64_t mask) {
  auto& cache = presence ? models_z_ : models_y_;
  auto it = cache.find(mask);
  if (it != cache.end()) return it->second;
  ComponentWorkspace& ws = presence ? *ws_z_ : *ws_y_;
  ComponentModel cm{ComponentCoefSampler(ws.gather_columns(mask), ws.p_base(), 0.0)};
  return cache.emplace(mask, std::move(cm)).first->second;
}

void ModelSearch::model_move(const PolyDag& dag, ComponentWorkspace& ws,
                             const ComponentWorkspace::Projection& proj,
                             double (ModelPrior::*log_prior)(std::uint64_t) const,
                             std::uint64_t* mask, RngStream& rng, MoveStats* stats) {
  const std::vector<std::uint64_t> nb = neighborhood(dag, *mask);
  if (nb.empty()) return;
  stats->attempted++;

  auto score = [&](std::uint64_t m) { return ws.log_marginal(proj, m) + (prior_.*log_prior)(m); };

  // Forward proposal over the neighborhood of the current model.
  std::vector<double> s_fwd(nb.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nb.size(); ++i) {
    s_fwd[i] = score(nb[i]);
    top = std::max(top, s_fwd[i]);
  }
  double norm = 0.0;
  for (double s : s_fwd) norm += std::exp(s - top);
  std::vector<double> q_fwd(nb.size());
  for (std::size_t i = 0; i < nb.size(); ++i)
    q_fwd[i] = 0.5 * std::exp(s_fwd[i] - top) / norm + 0.5 / double(nb.size());

  double u = rng.uniform01();
  std::size_t pick = nb.size() - 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < nb.size(); ++i) {
    acc += q_fwd[i];
    if (u <= acc) {
      pick = i;
      break;
    }
  }
  const std::uint64_t proposed = nb[pick];

  // Reverse kernel from the proposed model back to the current one.
  const std::vector<std::uint64_t> nb_rev = neighborhood(dag, proposed);
  std::vector<double> s_rev(nb_rev.size());
  double top_rev = -std::numeric_limits<double>::infinity();
  std::size_t back = nb_rev.size();
  for (std::size_t i = 0; i < nb_rev.size(); ++i) {
    s_rev[i] = score(nb_rev[i]);
    top_rev = std::max(top_rev, s_rev[i]);
    if (nb_rev[i] == *mask) back = i;
  }
  if (back == nb_rev.size()) throw NumericalError("asymmetric model neighborhood");
  double norm_rev = 0.0;
  for (double s : s_rev) norm_rev += std::exp(s - top_rev);
  const double q_rev =
      0.5 * std::exp(s_rev[back] - top_rev) / norm_rev + 0.5 / double(nb_rev.size());

  const double s_cur = score(*mask);
  const double s_new = s_fwd[pick];
  const double log_delta = s_new - s_cur + std::log(q_rev) - std::log(q_fwd[pick]);
  if (std::log(rng.uniform01()) < std::min(0.0, log_delta)) {
    *mask = proposed;
    stats->accepted++;
  }
}

SearchTrace ModelSearch::run(const SearchConfig& config) {
  if (config.iterations <= config.burn_in)
    throw ConfigError("search iterations must exceed burn_in");
  if (config.thin < 1) throw ConfigError("thin must be >= 1");
  if (dag_y_.n_candidates() == 0 && dag_z_.n_candidates() == 0)
    throw ConfigError("model space has a single model; nothing to search");
  if (!heredity_check(dag_z_, config.init.presence, prior_.config().heredity) ||
      !heredity_check(dag_y_, config.init.detection, prior_.config().heredity))
    throw ConfigError("initial model violates the heredity constraint");

  RngStream rng(config.seed, "model-search");
  ModelId current = config.init;

  // Initial coefficients at zero, latents drawn from the implied conditional.
  Eigen::VectorXd v, w;
  {
    const Eigen::VectorXd lp_z = Eigen::VectorXd::Zero(data_.n_sites());
    const Eigen::VectorXd lp_w = Eigen::VectorXd::Zero(data_.total_surveys());
    const std::vector<std::int8_t> z = sample_presence_indicators_lp(data_, lp_z, lp_w, rng);
    sample_latent_gaussians_lp(data_, lp_z, lp_w, z, rng, v, w);
  }

  SearchTrace trace;
  trace.iterations = config.iterations;
  trace.burn_in = config.burn_in;
  trace.thin = config.thin;
  const long long post = config.iterations - config.burn_in;
  trace.visits.reserve(post);
  trace.kept_models.reserve(post / config.thin + 1);

  MoveStats stats_z, stats_y;
  for (long long t = 0; t < config.iterations; ++t) {
    const bool keep_phase = t >= config.burn_in;
    MoveStats scratch_z, scratch_y;
    MoveStats* sz = keep_phase ? &stats_z : &scratch_z;
    MoveStats* sy = keep_phase ? &stats_y : &scratch_y;

    const auto proj_v = ws_z_->project(v);
    const auto proj_w = ws_y_->project(w);
    model_move(dag_z_, *ws_z_, proj_v, &ModelPrior::log_presence, &current.presence, rng, sz);
    model_move(dag_y_, *ws_y_, proj_w, &ModelPrior::log_detection, &current.detection, rng, sy);

    const ComponentCoefSampler& coef_z = component_model(true, current.presence).coef;
    const ComponentCoefSampler& coef_y = component_model(false, current.detection).coef;
    const Eigen::VectorXd alpha = coef_z.draw(v, rng);
    const Eigen::VectorXd lambda = coef_y.draw(w, rng);

    const Eigen::VectorXd lp_z = coef_z.linear_predictor(alpha);
    const Eigen::VectorXd lp_w = coef_y.linear_predictor(lambda);
    const std::vector<std::int8_t> z = sample_presence_indicators_lp(data_, lp_z, lp_w, rng);
    sample_latent_gaussians_lp(data_, lp_z, lp_w, z, rng, v, w);

    if (keep_phase) {
      trace.visits.push_back(current);
      if ((t - config.burn_in) % config.thin == 0) {
        trace.kept_models.push_back(current);
        trace.kept_v.push_back(v);
        trace.kept_w.push_back(w);
      }
    }
  }
  trace.accept_rate_z = stats_z.attempted ? double(stats_z.accepted) / stats_z.attempted : 0.0;
  trace.accept_rate_y = stats_y.attempted ? double(stats_y.accepted) / stats_y.attempted : 0.0;
  trace.last_model = current;
  return trace;
}

SearchTrace run_model_search(const SurveyData& data, const PolyDag& dag_y, const PolyDag& dag_z,
                             const SearchConfig& config) {
  ModelSearch search(data, dag_y, dag_z, config.prior, config.standardize);
  return search.run(config);
}

}  // namespace occsel
