#pragma once

#include <Eigen/Dense>
#include <vector>

#include "occsel/poly_dag.hpp"
#include "occsel/survey_data.hpp"

namespace occsel {

// Design matrices for one model: X over sites (presence), Q over surveys
// (detection). Base columns come first, then the included candidates in DAG
// order; *_terms records the DAG term behind each column.
struct DesignPair {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Q;
  int p_base_z = 0;
  int p_base_y = 0;
  std::vector<int> presence_terms;
  std::vector<int> detection_terms;

  int p_alpha() const { return int(X.cols()); }
  int p_lambda() const { return int(Q.cols()); }
};

// Covariates are standardized (centered, unit sample variance) before any
// polynomial term is formed, so x^2 means the square of the standardized
// covariate. Zero-variance covariates and rank-deficient base blocks are
// rejected.
DesignPair build_model_design(const SurveyData& data, const PolyDag& dag_z, const PolyDag& dag_y,
                              const ModelId& model, bool standardize = true);

// Component-level builder used wherever a single response block is assembled.
Eigen::MatrixXd build_component_design(const Eigen::MatrixXd& raw,
                                       const std::vector<std::string>& raw_names,
                                       const PolyDag& dag, std::uint64_t mask, bool standardize,
                                       std::vector<int>* column_terms);

}  // namespace occsel
