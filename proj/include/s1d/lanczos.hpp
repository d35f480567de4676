#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace s1d {

struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double achieved_residual)
      : std::runtime_error(what), residual(achieved_residual) {}
  double residual;
};

struct LanczosOptions {
  int max_krylov = 64;      // Krylov vectors kept before an explicit restart
  int max_restarts = 400;
  double tolerance = 1e-9;  // residual bound relative to the norm estimate
  std::uint64_t seed = 20160601;
};

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
};

/// y = H x for a real symmetric operator.
using MatVec = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

/// Lowest `count` eigenpairs of a real symmetric operator, ascending.
///
/// Lanczos with full reorthogonalization and explicit restarts. Eigenpairs
/// are found one at a time; every converged vector is locked and projected
/// out of later Krylov spaces, so repeated eigenvalues are resolved with
/// their multiplicity.
std::vector<EigenPair> lanczos_lowest(const MatVec& apply, Eigen::Index dim, int count,
                                      double norm_estimate, const LanczosOptions& opts = {});

}  // namespace s1d
