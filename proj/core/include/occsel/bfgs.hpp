#pragma once

#include <Eigen/Dense>
#include <functional>

namespace occsel {

struct OptimOptions {
  int max_iterations = 500;
  double grad_tol = 1e-6;    // infinity norm of the numerical gradient
  double step_h = 1e-5;      // central-difference step
  double norm_bound = 50.0;  // flag likely-divergent fits (e.g. separation)
};

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;
  bool converged = false;     // gradient tolerance met
  bool norm_bounded = false;  // stopped with the iterate norm past the bound
  int iterations = 0;
};

// Quasi-Newton ascent with numerical gradients: BFGS on -f, Armijo
// backtracking, inverse-Hessian update skipped (and reset to identity) when
// the curvature pairing s'y is not safely positive. Meant for smooth
// low-dimensional likelihood surfaces.
OptimResult maximize(const std::function<double(const Eigen::VectorXd&)>& f,
                     const Eigen::VectorXd& start, const OptimOptions& options = {});

}  // namespace occsel
