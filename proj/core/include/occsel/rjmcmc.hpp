#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "occsel/component.hpp"
#include "occsel/design.hpp"
#include "occsel/gibbs.hpp"
#include "occsel/model_prior.hpp"
#include "occsel/poly_dag.hpp"
#include "occsel/rng.hpp"
#include "occsel/survey_data.hpp"

namespace occsel {

struct SearchConfig {
  long long iterations = 200000;
  long long burn_in = 20000;
  int thin = 10;            // spacing of the stored latent draws
  std::uint64_t seed = 1;
  ModelId init{0, 0};       // base model unless told otherwise
  bool standardize = true;
  ModelPriorConfig prior;
};

struct SearchTrace {
  std::vector<ModelId> visits;        // model after each post-burn-in sweep
  std::vector<ModelId> kept_models;   // thinned, aligned with kept_v/kept_w
  std::vector<Eigen::VectorXd> kept_v;
  std::vector<Eigen::VectorXd> kept_w;
  long long iterations = 0;
  long long burn_in = 0;
  int thin = 1;
  double accept_rate_z = 0.0;  // accepted / attempted model moves, post burn-in
  double accept_rate_y = 0.0;
  ModelId last_model;
};

// Model-space sampler: per sweep, one marginalized model move per component
// (coefficients integrated out against the intrinsic prior, so acceptance
// only involves latent-marginal scores), then fresh coefficients for the
// accepted models, then fresh latents. The proposal over the neighborhood
// L(M) mixes the conditional posterior with a uniform kick,
//   q(M'|M) = 1/2 softmax(score(L(M))) + 1/2 / |L(M)|,
// and delta = min{1, exp(score(M')-score(M)) q(M|M')/q(M'|M)}.
class ModelSearch {
 public:
  ModelSearch(const SurveyData& data, const PolyDag& dag_y, const PolyDag& dag_z,
              const ModelPriorConfig& prior_config, bool standardize = true);

  SearchTrace run(const SearchConfig& config);

  ComponentWorkspace& presence_workspace() { return *ws_z_; }
  ComponentWorkspace& detection_workspace() { return *ws_y_; }
  const ModelPrior& prior() const { return prior_; }
  const PolyDag& dag_y() const { return dag_y_; }
  const PolyDag& dag_z() const { return dag_z_; }
  const SurveyData& data() const { return data_; }

 private:
  struct ComponentModel {
    ComponentCoefSampler coef;
  };
  const ComponentModel& component_model(bool presence, std::uint64_t mask);

  // One marginalized move; returns whether a proposal was attempted/accepted
  // and updates `mask` in place.
  struct MoveStats {
    long long attempted = 0;
    long long accepted = 0;
  };
  void model_move(const PolyDag& dag, ComponentWorkspace& ws,
                  const ComponentWorkspace::Projection& proj,
                  double (ModelPrior::*log_prior)(std::uint64_t) const, std::uint64_t* mask,
                  RngStream& rng, MoveStats* stats);

  SurveyData data_;
  PolyDag dag_y_, dag_z_;
  ModelPrior prior_;
  std::unique_ptr<ComponentWorkspace> ws_z_, ws_y_;
  std::unordered_map<std::uint64_t, ComponentModel> models_z_, models_y_;
};

// Convenience wrapper: build the search and run one chain.
SearchTrace run_model_search(const SurveyData& data, const PolyDag& dag_y, const PolyDag& dag_z,
                             const SearchConfig& config);

}  // namespace occsel
