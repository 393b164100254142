#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "occsel/chib.hpp"
#include "occsel/model_prior.hpp"
#include "occsel/poly_dag.hpp"
#include "occsel/rjmcmc.hpp"
#include "occsel/survey_data.hpp"

namespace occsel {

// Posterior model probabilities from one estimator over a declared model
// list. mc_se, when non-empty, is aligned with models; chib carries the
// per-model marginal-likelihood diagnostics for the exact estimator.
struct PosteriorReport {
  std::string estimator;  // "epe", "rpe" or "fpe"
  std::vector<ModelId> models;
  std::vector<double> probability;
  std::vector<double> mc_se;
  std::vector<ChibEstimate> chib;
};

// Full enumeration when it fits under `enumeration_cap`, otherwise the
// visited models and their one-step component neighborhoods.
std::vector<ModelId> default_model_set(const SearchTrace& trace, const PolyDag& dag_y,
                                       const PolyDag& dag_z, Heredity heredity,
                                       std::size_t enumeration_cap = 100000);

// Visit frequencies over the whole post-burn-in trace. Models outside the
// list contribute to the denominator, so the report sums to at most one.
PosteriorReport estimate_fpe(const SearchTrace& trace, const std::vector<ModelId>& models);

// Rao-Blackwellized estimate: the exact model posterior given each thinned
// latent draw, normalized over `models`, averaged over draws.
PosteriorReport estimate_rpe(const SearchTrace& trace, ModelSearch& search,
                             const std::vector<ModelId>& models);

// Exact-marginal estimate: one Chib run per model. Model k uses the rng
// substream (seed, "chib-model", k); runs are independent, so threads only
// change wall time.
PosteriorReport estimate_epe(const SurveyData& data, const PolyDag& dag_y,
                             const PolyDag& dag_z, const std::vector<ModelId>& models,
                             const ModelPriorConfig& prior_config, const ChibOptions& options,
                             std::uint64_t seed, int threads, bool standardize = true);

// Threshold set of one component's MPIPs: bits with MPIP >= threshold, plus
// the ancestors required to restore strong heredity. `repaired` reports
// whether the closure added anything.
std::uint64_t mpm_mask_from_mpip(const std::vector<double>& mpip, const PolyDag& dag,
                                 double threshold, bool* repaired);

struct SelectionSummary {
  std::vector<double> mpip_detection;  // per candidate bit of dag_y
  std::vector<double> mpip_presence;
  double threshold = 0.5;
  ModelId mpm_raw;  // threshold set before heredity repair
  ModelId mpm;
  bool mpm_repaired_detection = false;
  bool mpm_repaired_presence = false;
  ModelId hpm;  // ties: fewer total terms, then lexicographic term order
                // (presence list compared first)
};

SelectionSummary summarize_selection(const PosteriorReport& report, const PolyDag& dag_y,
                                     const PolyDag& dag_z, double threshold = 0.5);

// 1/2 sum |p_a - p_b| over the union of the two model lists.
double total_variation(const PosteriorReport& a, const PosteriorReport& b);

// Tab-separated persistence of a report; masks are stored as term-name
// strings, so files are stable across bit-order changes only if the DAG
// construction is unchanged.
void write_posterior_scores(const std::string& path, const PosteriorReport& report,
                            const PolyDag& dag_y, const PolyDag& dag_z);
PosteriorReport read_posterior_scores(const std::string& path, const PolyDag& dag_y,
                                      const PolyDag& dag_z);

}  // namespace occsel
