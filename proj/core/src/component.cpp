#include "occsel/component.hpp"

#include <cmath>

#include "occsel/errors.hpp"

namespace occsel {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;

double log_det_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}
}  // namespace

ComponentWorkspace::ComponentWorkspace(Eigen::MatrixXd x_full, int p_base,
                                       std::vector<std::string> column_names)
    : x_full_(std::move(x_full)), p_base_(p_base), column_names_(std::move(column_names)) {
  if (p_base_ < 1 || p_base_ > x_full_.cols())
    throw NumericalError("component base dimension out of range");
  gram_full_ = x_full_.transpose() * x_full_;
  base_llt_.compute(gram_full_.topLeftCorner(p_base_, p_base_));
  if (base_llt_.info() != Eigen::Success)
    throw NumericalError("singular base Gram block");
  log_det_base_ = log_det_from_llt(base_llt_);
}

const ComponentWorkspace::SubsetFactors& ComponentWorkspace::factors(std::uint64_t mask) {
  auto it = cache_.find(mask);
  if (it != cache_.end()) return it->second;

  SubsetFactors f;
  for (int b = 0; b < n_candidates(); ++b)
    if (mask >> b & 1) f.bits.push_back(b);
  const int pa = int(f.bits.size());
  const int p = p_base_ + pa;
  const double n2 = 2.0 * n();
  f.p_total = p;
  f.shrink = n2 / (n2 + p);
  f.log_marginal_const = -0.5 * (n() - p_base_) * kLogTwoPi - 0.5 * log_det_base_ +
                         0.5 * (p - p_base_) * std::log(p / (n2 + p));

  if (pa > 0) {
    Eigen::MatrixXd g0a(p_base_, pa), gaa(pa, pa);
    for (int j = 0; j < pa; ++j) {
      const int cj = p_base_ + f.bits[j];
      g0a.col(j) = gram_full_.block(0, cj, p_base_, 1);
      for (int i = 0; i < pa; ++i) gaa(i, j) = gram_full_(p_base_ + f.bits[i], cj);
    }
    f.cross = base_llt_.solve(g0a);
    const Eigen::MatrixXd schur = gaa - g0a.transpose() * f.cross;
    f.schur_llt.compute(schur);
    f.gram_a_llt.compute(gaa);
    if (f.schur_llt.info() != Eigen::Success || f.gram_a_llt.info() != Eigen::Success) {
      std::string cols;
      for (int b : f.bits) {
        if (!cols.empty()) cols += ", ";
        cols += column_names_[std::size_t(p_base_ + b)];
      }
      throw NumericalError("collinear candidate columns {" + cols + "}");
    }
    f.log_det_schur = log_det_from_llt(f.schur_llt);
  }
  return cache_.emplace(mask, std::move(f)).first->second;
}

ComponentWorkspace::Projection ComponentWorkspace::project(const Eigen::VectorXd& v) const {
  Projection proj;
  proj.g = x_full_.transpose() * v;
  proj.vv = v.squaredNorm();
  proj.base_quad =
      base_llt_.matrixL().solve(proj.g.head(p_base_)).squaredNorm();
  return proj;
}

double ComponentWorkspace::log_marginal(const Projection& proj, std::uint64_t mask) {
  const SubsetFactors& f = factors(mask);
  double quad = proj.vv - proj.base_quad;
  if (!f.bits.empty()) {
    Eigen::VectorXd u(f.bits.size());
    for (std::size_t j = 0; j < f.bits.size(); ++j) u[long(j)] = proj.g[p_base_ + f.bits[j]];
    u.noalias() -= f.cross.transpose() * proj.g.head(p_base_);
    quad -= f.shrink * f.schur_llt.matrixL().solve(u).squaredNorm();
  }
  return f.log_marginal_const - 0.5 * quad;
}

double ComponentWorkspace::log_marginal(const Eigen::VectorXd& v, std::uint64_t mask) {
  return log_marginal(project(v), mask);
}

double ComponentWorkspace::log_intrinsic_prior(const Eigen::VectorXd& coef_a,
                                               std::uint64_t mask) {
  const SubsetFactors& f = factors(mask);
  const int pa = int(f.bits.size());
  if (pa == 0) return 0.0;
  if (coef_a.size() != pa) throw NumericalError("coefficient block size mismatch");
  // Covariance (2n/p) Schur^{-1}: precision (p/2n) Schur.
  const double rate = f.p_total / (2.0 * n());
  const double quad = rate * (f.schur_llt.matrixU() * coef_a).squaredNorm();
  const double log_det_cov = -f.log_det_schur - pa * std::log(rate);
  return -0.5 * pa * kLogTwoPi - 0.5 * log_det_cov - 0.5 * quad;
}

Eigen::MatrixXd ComponentWorkspace::gather_columns(std::uint64_t mask) const {
  std::vector<int> cols;
  for (int j = 0; j < p_base_; ++j) cols.push_back(j);
  for (int b = 0; b < n_candidates(); ++b)
    if (mask >> b & 1) cols.push_back(p_base_ + b);
  Eigen::MatrixXd out(x_full_.rows(), long(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(long(j)) = x_full_.col(cols[j]);
  return out;
}

}  // namespace occsel
