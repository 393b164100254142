#pragma once

// Numerical-integration oracles for closed-form results.
//
// integrate_1d: adaptive Gauss-Kronrod on an interval (boost).
// integrate_whitened: order-escalating tensor Gauss-Hermite over R^d for
//   integrands that are approximately exp(-|u|^2/2) after a whitening map;
//   the order doubles until two successive rules agree, so accuracy is
//   verified rather than assumed.

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace occsel_test {

inline double integrate_1d(const std::function<double(double)>& f, double lo,
                           double hi, double rel_tol, int max_depth = 10) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, lo, hi, max_depth, rel_tol);
}

struct HermiteRule {
  std::vector<double> nodes;    // points u_i for integrals over du
  std::vector<double> weights;  // includes the e^{+x^2} compensation
};

// Golub-Welsch nodes/weights for the physicists' Hermite weight, mapped so
// that  integral f(u) du  =  sum_i weights[i] * f(nodes[i])  is exact for
// f = exp(-u^2/2) * polynomial.
inline HermiteRule hermite_rule(int order) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    double b = std::sqrt(k / 2.0);
    jacobi(k - 1, k) = b;
    jacobi(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  HermiteRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double sqrt_pi = std::sqrt(M_PI);
  for (int i = 0; i < order; ++i) {
    double x = es.eigenvalues()(i);
    double w = sqrt_pi * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    rule.nodes[i] = std::sqrt(2.0) * x;
    // du = sqrt(2) dx and the weight function e^{-x^2} is divided back out.
    rule.weights[i] = std::sqrt(2.0) * w * std::exp(x * x);
  }
  return rule;
}

inline double tensor_hermite(const std::function<double(const std::vector<double>&)>& f,
                             int dim, const HermiteRule& rule) {
  const int m = int(rule.nodes.size());
  std::vector<double> point(dim, 0.0);
  std::function<double(int)> nest = [&](int k) -> double {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      point[k] = rule.nodes[i];
      acc += rule.weights[i] * (k + 1 == dim ? f(point) : nest(k + 1));
    }
    return acc;
  };
  return nest(0);
}

// Escalates the rule order until two successive log-results agree within
// rel_tol; throws if they never do.
inline double integrate_whitened(
    const std::function<double(const std::vector<double>&)>& f, int dim,
    double rel_tol = 1e-8) {
  double prev = 0.0;
  bool have_prev = false;
  for (int order : {24, 36, 52, 76}) {
    double cur = tensor_hermite(f, dim, hermite_rule(order));
    if (have_prev && std::abs(std::log(cur) - std::log(prev)) < rel_tol) return cur;
    prev = cur;
    have_prev = true;
  }
  throw std::runtime_error("whitened quadrature did not stabilize");
}

}  // namespace occsel_test
