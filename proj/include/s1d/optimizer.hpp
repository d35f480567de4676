#pragma once

#include <functional>

#include <Eigen/Dense>

namespace s1d {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct NelderMeadOptions {
  double ftol = 1e-8;    // stop when the simplex values span less than this
  int max_evals = 20000;
  int max_restarts = 3;  // fresh simplex around the incumbent after convergence
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evals = 0;
  bool converged = false;
};

/// Nelder-Mead with dimension-adapted coefficients. The starting point is a
/// vertex of the initial simplex, so the result never exceeds f(x0).
NelderMeadResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& steps, const NelderMeadOptions& opts = {});

}  // namespace s1d
