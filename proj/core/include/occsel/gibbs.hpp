#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "occsel/design.hpp"
#include "occsel/rng.hpp"
#include "occsel/survey_data.hpp"

namespace occsel {

struct CoefficientState {
  Eigen::VectorXd alpha;   // presence, base block first
  Eigen::VectorXd lambda;  // detection, base block first
};

struct LatentState {
  std::vector<std::int8_t> z;  // site occupancy
  Eigen::VectorXd v;           // presence scores, sign-linked to z
  Eigen::VectorXd w;           // detection scores, sign-linked to y where z = 1
};

struct ChainConfig {
  long long iterations = 20000;
  long long burn_in = 2000;
  int thin = 10;
  std::uint64_t seed = 1;
  int n_chains = 1;
  // Test seam: ridge precision on the base coefficient blocks. 0 is the flat
  // production prior; a positive value makes the implied joint proper, which
  // sampler-correctness harnesses need.
  double base_ridge = 0.0;
};

// Mixture likelihood of the detection histories, occupancy summed out for
// never-detected sites. Finite for any finite coefficients.
double observed_data_loglik(const SurveyData& data, const DesignPair& design,
                            const CoefficientState& coeffs);

// Linear-predictor variants of the augmentation steps; the design-based
// entries below and the model-jump sampler both delegate here.
double observed_data_loglik_lp(const SurveyData& data, const Eigen::VectorXd& lp_z,
                               const Eigen::VectorXd& lp_w);
Eigen::VectorXd presence_conditional_lp(const SurveyData& data, const Eigen::VectorXd& lp_z,
                                        const Eigen::VectorXd& lp_w);
std::vector<std::int8_t> sample_presence_indicators_lp(const SurveyData& data,
                                                       const Eigen::VectorXd& lp_z,
                                                       const Eigen::VectorXd& lp_w,
                                                       RngStream& rng);
void sample_latent_gaussians_lp(const SurveyData& data, const Eigen::VectorXd& lp_z,
                                const Eigen::VectorXd& lp_w, const std::vector<std::int8_t>& z,
                                RngStream& rng, Eigen::VectorXd& v, Eigen::VectorXd& w);

// P(z_i = 1 | y, coefficients): 1 where the site has a detection, otherwise
// psi * prod_j(1-p) / (psi * prod_j(1-p) + 1 - psi), assembled in log space.
Eigen::VectorXd presence_conditional(const SurveyData& data, const DesignPair& design,
                                     const CoefficientState& coeffs);

std::vector<std::int8_t> sample_presence_indicators(const SurveyData& data,
                                                    const DesignPair& design,
                                                    const CoefficientState& coeffs,
                                                    RngStream& rng);

// v_i from N(x_i'alpha, 1) truncated by z_i; w_ij from N(q_ij'lambda, 1)
// truncated by (z_i, y_ij), untruncated where z_i = 0.
void sample_latent_gaussians(const SurveyData& data, const DesignPair& design,
                             const CoefficientState& coeffs, const std::vector<std::int8_t>& z,
                             RngStream& rng, Eigen::VectorXd& v, Eigen::VectorXd& w);

// Per-component Gram factors for the coefficient block, working in the
// base-residualized parametrization: coef.head(p0) multiplies the base
// columns, coef.tail(pa) multiplies the candidate columns with their base
// projection removed. The blocks are conditionally independent there; the
// non-base draw shrinks the Schur-complement inverse by 2n/(2n+p) with p the
// total model dimension, the base draw is least squares (plus the optional
// ridge seam). Linear predictors must come from linear_predictor(), not from
// the raw design.
struct ComponentCoefSampler {
  Eigen::MatrixXd x0, xa;
  Eigen::LLT<Eigen::MatrixXd> llt0;  // X0'X0 + ridge I
  Eigen::LLT<Eigen::MatrixXd> llta;  // XA'XA
  double shrink = 1.0;
  double log_det0 = 0.0, log_deta = 0.0;
  double ridge = 0.0;
  int p0 = 0, pa = 0;

  ComponentCoefSampler() = default;
  ComponentCoefSampler(const Eigen::MatrixXd& design, int p_base, double ridge);
  Eigen::VectorXd draw(const Eigen::VectorXd& latent, RngStream& rng) const;
  double log_ordinate(const Eigen::VectorXd& latent, const Eigen::VectorXd& at) const;
  // log prior density contributed by the ridge seam (0 when flat).
  double log_ridge_prior(const Eigen::VectorXd& coef) const;
  Eigen::VectorXd linear_predictor(const Eigen::VectorXd& coef) const;
};

CoefficientState sample_coefficients(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                                     const ComponentCoefSampler& presence,
                                     const ComponentCoefSampler& detection, RngStream& rng);

// Two-block data-augmentation sampler for a fixed model: (alpha, lambda | v, w)
// then (z, then v, w | alpha, lambda, y).
class SingleModelSampler {
 public:
  SingleModelSampler(const SurveyData& data, const DesignPair& design, double base_ridge = 0.0);

  void initialize(RngStream& rng);  // coefficients at 0, latents drawn
  void sweep(RngStream& rng);
  void refresh_coefficients(RngStream& rng);
  void refresh_latents(RngStream& rng);

  const CoefficientState& coefficients() const { return coeffs_; }
  const LatentState& latents() const { return latents_; }
  const ComponentCoefSampler& presence_block() const { return presence_; }
  const ComponentCoefSampler& detection_block() const { return detection_; }

  // Density of the coefficient block conditional at `point`, given the
  // current latents; the blocks are conditionally independent so this is a
  // single Rao-Blackwellizable ordinate.
  double log_coefficient_ordinate(const CoefficientState& point) const;

  double loglik(const CoefficientState& point) const;

  // Sampler-correctness harness support: forward-simulate the augmented model
  // at the current coefficients (v, w unconstrained normals, z = 1{v > 0},
  // y = z * 1{w > 0}), replacing latents and observations in place.
  void forward_simulate(RngStream& rng);
  void set_coefficients(CoefficientState coeffs) { coeffs_ = std::move(coeffs); }

  const SurveyData& data() const { return data_; }

 private:
  SurveyData data_;  // own a copy: regenerate_observations mutates y
  DesignPair design_;
  ComponentCoefSampler presence_, detection_;
  CoefficientState coeffs_;
  LatentState latents_;
};

struct ChainDraws {
  std::vector<CoefficientState> coefficients;
  std::vector<LatentState> latents;
};

// Thinned post-burn-in draws; deterministic for a given config.
ChainDraws run_single_model_chain(const SurveyData& data, const DesignPair& design,
                                  const ChainConfig& config);

}  // namespace occsel
