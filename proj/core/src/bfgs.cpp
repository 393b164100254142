#include "occsel/bfgs.hpp"

#include <cmath>

#include "occsel/errors.hpp"

namespace occsel {

namespace {

Eigen::VectorXd central_gradient(const std::function<double(const Eigen::VectorXd&)>& g,
                                 const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + h;
    const double up = g(probe);
    probe[j] = x[j] - h;
    const double down = g(probe);
    probe[j] = x[j];
    grad[j] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace

OptimResult maximize(const std::function<double(const Eigen::VectorXd&)>& f,
                     const Eigen::VectorXd& start, const OptimOptions& options) {
  if (start.size() == 0) throw ConfigError("empty optimization start point");
  const auto g = [&f](const Eigen::VectorXd& x) { return -f(x); };
  const Eigen::Index dim = start.size();

  OptimResult out;
  out.x = start;
  double g_cur = g(out.x);
  if (!std::isfinite(g_cur)) throw NumericalError("objective not finite at the start point");
  Eigen::VectorXd grad = central_gradient(g, out.x, options.step_h);
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(dim, dim);

  for (int it = 0; it < options.max_iterations; ++it) {
    out.iterations = it;
    if (grad.lpNorm<Eigen::Infinity>() < options.grad_tol) {
      out.converged = true;
      break;
    }
    if (out.x.norm() > options.norm_bound) {
      out.norm_bounded = true;
      break;
    }

    Eigen::VectorXd direction = -(h_inv * grad);
    double slope = direction.dot(grad);
    if (!(slope < 0.0)) {  // not a descent direction: restart from steepest
      h_inv.setIdentity();
      direction = -grad;
      slope = direction.dot(grad);
    }

    double step = 1.0;
    double g_next = g_cur;
    Eigen::VectorXd x_next = out.x;
    bool moved = false;
    while (step >= 1e-14) {
      x_next = out.x + step * direction;
      g_next = g(x_next);
      if (std::isfinite(g_next) && g_next <= g_cur + 1e-4 * step * slope) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;  // no acceptable step even at machine scale

    const Eigen::VectorXd grad_next = central_gradient(g, x_next, options.step_h);
    const Eigen::VectorXd s = x_next - out.x;
    const Eigen::VectorXd y = grad_next - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left =
          Eigen::MatrixXd::Identity(dim, dim) - rho * s * y.transpose();
      h_inv = left * h_inv * left.transpose() + rho * s * s.transpose();
    } else {
      h_inv.setIdentity();
    }
    out.x = x_next;
    g_cur = g_next;
    grad = grad_next;
  }

  if (!out.converged && !out.norm_bounded &&
      grad.lpNorm<Eigen::Infinity>() < options.grad_tol)
    out.converged = true;  // tolerance reached exactly at the iteration cap
  out.value = -g_cur;
  return out;
}

}  // namespace occsel
