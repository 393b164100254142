#include "occsel/design.hpp"

#include <algorithm>
#include <cmath>

#include "occsel/errors.hpp"

namespace occsel {

namespace {

// Columns of `raw` restricted to the DAG's covariates, standardized in place.
Eigen::MatrixXd standardized_covariates(const Eigen::MatrixXd& raw,
                                        const std::vector<std::string>& raw_names,
                                        const PolyDag& dag, bool standardize) {
  Eigen::MatrixXd out(raw.rows(), long(dag.covariates.size()));
  for (std::size_t k = 0; k < dag.covariates.size(); ++k) {
    auto it = std::find(raw_names.begin(), raw_names.end(), dag.covariates[k]);
    if (it == raw_names.end())
      throw DataError("covariate '" + dag.covariates[k] + "' is not in the data");
    Eigen::VectorXd col = raw.col(it - raw_names.begin());
    if (standardize) {
      const double n = double(col.size());
      const double mean = col.mean();
      col.array() -= mean;
      const double var = n > 1 ? col.squaredNorm() / (n - 1.0) : 0.0;
      if (var <= 0.0 || !std::isfinite(var))
        throw DataError("covariate '" + dag.covariates[k] + "' has zero variance");
      col /= std::sqrt(var);
    }
    out.col(long(k)) = col;
  }
  return out;
}

Eigen::VectorXd term_column(const Eigen::MatrixXd& covs, const PolyTerm& term) {
  Eigen::VectorXd col = Eigen::VectorXd::Ones(covs.rows());
  for (std::size_t k = 0; k < term.powers.size(); ++k)
    for (int d = 0; d < term.powers[k]; ++d) col.array() *= covs.col(long(k)).array();
  return col;
}

void check_base_rank(const Eigen::MatrixXd& design, int p_base, const char* which) {
  const Eigen::MatrixXd gram =
      design.leftCols(p_base).transpose() * design.leftCols(p_base);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const Eigen::VectorXd d = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || d.minCoeff() <= d.maxCoeff() * 1e-10)
    throw DataError(std::string("rank-deficient base block in the ") + which + " design");
}

}  // namespace

Eigen::MatrixXd build_component_design(const Eigen::MatrixXd& raw,
                                       const std::vector<std::string>& raw_names,
                                       const PolyDag& dag, std::uint64_t mask, bool standardize,
                                       std::vector<int>* column_terms) {
  const Eigen::MatrixXd covs = standardized_covariates(raw, raw_names, dag, standardize);
  std::vector<int> cols;
  for (int t : dag.base) cols.push_back(t);
  for (int b = 0; b < dag.n_candidates(); ++b)
    if (mask >> b & 1) cols.push_back(dag.candidates[b]);
  Eigen::MatrixXd design(raw.rows(), long(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    design.col(long(j)) = term_column(covs, dag.terms[cols[j]]);
  if (column_terms) *column_terms = cols;
  return design;
}

DesignPair build_model_design(const SurveyData& data, const PolyDag& dag_z, const PolyDag& dag_y,
                              const ModelId& model, bool standardize) {
  DesignPair d;
  d.X = build_component_design(data.site_covariates, data.site_covariate_names, dag_z,
                               model.presence, standardize, &d.presence_terms);
  d.Q = build_component_design(data.survey_covariates, data.survey_covariate_names, dag_y,
                               model.detection, standardize, &d.detection_terms);
  d.p_base_z = int(dag_z.base.size());
  d.p_base_y = int(dag_y.base.size());
  check_base_rank(d.X, d.p_base_z, "presence");
  check_base_rank(d.Q, d.p_base_y, "detection");
  return d;
}

}  // namespace occsel
