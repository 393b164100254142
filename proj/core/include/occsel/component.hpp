#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace occsel {

// One response component (presence over sites or detection over surveys),
// holding the full candidate design [X0 | all candidate columns] and a lazily
// grown cache of per-subset factorizations. Everything the closed-form latent
// marginal needs is Gram-sized; no n x n hat matrix is ever formed:
//
//   log m(v | A) = -((n-p0)/2) log 2pi + ((p-p0)/2) log(p/(2n+p))
//                  - (1/2) log|X0'X0|
//                  - (1/2) [ v'v - v'H0 v - (2n/(2n+p)) v'Hperp v ]
//
// with p the total column count of the model, H0 the base hat matrix and
// Hperp the hat matrix of (I-H0)X_A, both reduced to Cholesky solves against
// X0'X0 and the base-Schur complement of the subset Gram.
//
// The cache is written on first touch of a subset and is not synchronized:
// share one workspace per chain, never across threads.
class ComponentWorkspace {
 public:
  ComponentWorkspace(Eigen::MatrixXd x_full, int p_base, std::vector<std::string> column_names);

  int n() const { return int(x_full_.rows()); }
  int p_base() const { return p_base_; }
  int n_candidates() const { return int(x_full_.cols()) - p_base_; }
  const Eigen::MatrixXd& x_full() const { return x_full_; }
  double log_det_base() const { return log_det_base_; }

  struct SubsetFactors {
    std::vector<int> bits;           // candidate bit indices, ascending
    Eigen::LLT<Eigen::MatrixXd> schur_llt;   // X_A'(I-H0)X_A
    Eigen::MatrixXd cross;           // (X0'X0)^{-1} X0'X_A
    Eigen::LLT<Eigen::MatrixXd> gram_a_llt;  // X_A'X_A
    double log_det_schur = 0.0;
    double log_marginal_const = 0.0;
    double shrink = 1.0;             // 2n/(2n+p), also the coefficient shrinkage
    int p_total = 0;
  };

  const SubsetFactors& factors(std::uint64_t mask);

  // Per-draw sufficient statistics shared by every subset score.
  struct Projection {
    Eigen::VectorXd g;  // x_full' v
    double vv = 0.0;    // v'v
    double base_quad = 0.0;  // v'H0 v
  };
  Projection project(const Eigen::VectorXd& v) const;

  double log_marginal(const Projection& proj, std::uint64_t mask);
  double log_marginal(const Eigen::VectorXd& v, std::uint64_t mask);

  // v'H0v and the two quadratic pieces are reused by samplers as well.
  const Eigen::LLT<Eigen::MatrixXd>& base_llt() const { return base_llt_; }

  // log N(coef_a; 0, (2n/p) Schur^{-1}) — the proper non-base block of the
  // intrinsic prior; 0 for the empty subset.
  double log_intrinsic_prior(const Eigen::VectorXd& coef_a, std::uint64_t mask);

  Eigen::MatrixXd gather_columns(std::uint64_t mask) const;  // base first, then subset

 private:
  Eigen::MatrixXd x_full_;
  int p_base_;
  std::vector<std::string> column_names_;
  Eigen::MatrixXd gram_full_;
  Eigen::LLT<Eigen::MatrixXd> base_llt_;
  double log_det_base_ = 0.0;
  std::unordered_map<std::uint64_t, SubsetFactors> cache_;
};

}  // namespace occsel
