#include "occsel/intrinsic.hpp"

#include <cmath>
#include <limits>

#include "occsel/errors.hpp"

namespace occsel {

IntrinsicGram make_intrinsic_gram(const Eigen::MatrixXd& design, int base_dim) {
  if (base_dim < 1 || base_dim > design.cols())
    throw NumericalError("base dimension out of range");
  IntrinsicGram g;
  g.gram_full = design.transpose() * design;
  g.base_dim = base_dim;
  g.sample_size = int(design.rows());
  g.total_dim = int(design.cols());
  const int pa = g.total_dim - base_dim;
  const auto g00 = g.gram_full.topLeftCorner(base_dim, base_dim);
  const auto g0a = g.gram_full.topRightCorner(base_dim, pa);
  const auto gaa = g.gram_full.bottomRightCorner(pa, pa);
  Eigen::LLT<Eigen::MatrixXd> base_llt(g00);
  if (base_llt.info() != Eigen::Success) throw NumericalError("singular base Gram block");
  g.schur = gaa - g0a.transpose() * base_llt.solve(g0a);
  return g;
}

Eigen::MatrixXd intrinsic_prior_covariance(const IntrinsicGram& gram) {
  const int pa = gram.total_dim - gram.base_dim;
  if (pa == 0) return Eigen::MatrixXd(0, 0);
  Eigen::LLT<Eigen::MatrixXd> llt(gram.schur);
  bool bad = llt.info() != Eigen::Success;
  if (!bad) {
    const Eigen::VectorXd diag = llt.matrixLLT().diagonal();
    bad = diag.minCoeff() <= diag.maxCoeff() * 1e-12;
  }
  if (bad) {
    // Rank-revealing QR: pivot order past the numerical rank names the
    // columns that are linear combinations of the ones before them.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram.schur);
    qr.setThreshold(1e-10);
    const auto perm = qr.colsPermutation().indices();
    std::string cols;
    for (int j = int(qr.rank()); j < pa; ++j) {
      if (!cols.empty()) cols += ", ";
      cols += "candidate column " + std::to_string(perm[j] + 1);
    }
    throw NumericalError("intrinsic prior covariance is singular (" +
                         (cols.empty() ? std::string("collinear candidate block") : cols) + ")");
  }
  const double scale = 2.0 * gram.sample_size / double(gram.total_dim);
  return scale * llt.solve(Eigen::MatrixXd::Identity(pa, pa));
}

double log_latent_marginal(const Eigen::VectorXd& v, const Eigen::MatrixXd& design,
                           int base_dim) {
  std::vector<std::string> names;
  for (int j = 0; j < design.cols(); ++j) names.push_back("c" + std::to_string(j + 1));
  ComponentWorkspace ws(design, base_dim, names);
  const std::uint64_t full = (std::uint64_t(1) << ws.n_candidates()) - 1;
  return ws.log_marginal(v, full);
}

std::vector<double> latent_model_posterior(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                                           ComponentWorkspace& presence,
                                           ComponentWorkspace& detection,
                                           const std::vector<ModelId>& models,
                                           const ModelPrior& prior) {
  if (models.empty()) throw NumericalError("empty model list");
  std::vector<double> logs(models.size());
  const auto proj_v = presence.project(v);
  const auto proj_w = detection.project(w);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < models.size(); ++k) {
    logs[k] = presence.log_marginal(proj_v, models[k].presence) +
              detection.log_marginal(proj_w, models[k].detection) +
              prior.log_prior(models[k]);
    top = std::max(top, logs[k]);
  }
  if (!std::isfinite(top)) throw NumericalError("no model has positive posterior mass");
  double norm = 0.0;
  for (double& l : logs) {
    l = std::exp(l - top);
    norm += l;
  }
  for (double& l : logs) l /= norm;
  return logs;
}

}  // namespace occsel
