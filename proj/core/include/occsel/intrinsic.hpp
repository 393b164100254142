#pragma once

#include <Eigen/Dense>
#include <vector>

#include "occsel/component.hpp"
#include "occsel/model_prior.hpp"
#include "occsel/poly_dag.hpp"

namespace occsel {

// Gram-level summary of one component design [X0 | X_A].
struct IntrinsicGram {
  Eigen::MatrixXd gram_full;  // [X0 X_A]'[X0 X_A]
  Eigen::MatrixXd schur;      // X_A'X_A - X_A'X0 (X0'X0)^{-1} X0'X_A
  int base_dim = 0;
  int sample_size = 0;
  int total_dim = 0;
};

IntrinsicGram make_intrinsic_gram(const Eigen::MatrixXd& design, int base_dim);

// Covariance of the non-base coefficient block: the training-sample Gram
// scaling turns 2 (Xt_A'(I - Ht_0) Xt_A)^{-1} into (2n/p) Schur^{-1} with p
// the total model dimension. Errors name the offending columns when the
// Schur complement is singular.
Eigen::MatrixXd intrinsic_prior_covariance(const IntrinsicGram& gram);

// Closed-form marginal of the latent Gaussian vector under one subset, flat
// base coefficients integrated out. Standalone entry; hot paths go through
// ComponentWorkspace::log_marginal.
double log_latent_marginal(const Eigen::VectorXd& v, const Eigen::MatrixXd& design,
                           int base_dim);

// Posterior over a model list given the latent vectors: probability[k]
// proportional to m(v|M_k) m(w|M_k) pi(M_k), normalized over the list.
std::vector<double> latent_model_posterior(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                                           ComponentWorkspace& presence,
                                           ComponentWorkspace& detection,
                                           const std::vector<ModelId>& models,
                                           const ModelPrior& prior);

}  // namespace occsel
