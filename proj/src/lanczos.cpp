#include "s1d/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace s1d {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void project_out(VectorXd& w, const MatrixXd& basis, Eigen::Index cols) {
  if (cols == 0) return;
  // classical Gram-Schmidt applied twice
  for (int pass = 0; pass < 2; ++pass) {
    const VectorXd c = basis.leftCols(cols).transpose() * w;
    w.noalias() -= basis.leftCols(cols) * c;
  }
}

}  // namespace

std::vector<EigenPair> lanczos_lowest(const MatVec& apply, Eigen::Index dim, int count,
                                      double norm_estimate, const LanczosOptions& opts) {
  if (count < 1 || count > dim) throw std::invalid_argument("lanczos_lowest: bad eigenpair count");
  const double abs_tol = opts.tolerance * std::max(norm_estimate, 1.0);
  const Eigen::Index m = std::min<Eigen::Index>(opts.max_krylov, dim);

  MatrixXd locked(dim, count);
  std::vector<EigenPair> found;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;

  MatrixXd V(dim, m);
  VectorXd w(dim), x(dim), hx(dim);

  for (int e = 0; e < count; ++e) {
    VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = gauss(rng);
    project_out(v, locked, e);
    v.normalize();

    double best_residual = std::numeric_limits<double>::infinity();
    bool done = false;
    for (int restart = 0; restart <= opts.max_restarts && !done; ++restart) {
      std::vector<double> alpha, beta;
      V.col(0) = v;
      Eigen::Index steps = 0;
      double theta = 0.0;
      VectorXd y;
      for (Eigen::Index j = 0; j < m; ++j) {
        apply(V.col(j), w);
        const double a = V.col(j).dot(w);
        alpha.push_back(a);
        project_out(w, V, j + 1);
        project_out(w, locked, e);
        const double b = w.norm();
        steps = j + 1;

        Eigen::SelfAdjointEigenSolver<MatrixXd> tri;
        VectorXd diag = Eigen::Map<VectorXd>(alpha.data(), steps);
        VectorXd off = beta.empty() ? VectorXd() : Eigen::Map<VectorXd>(beta.data(), steps - 1);
        tri.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
        theta = tri.eigenvalues()(0);
        y = tri.eigenvectors().col(0);
        const double ritz_residual = b * std::abs(y(steps - 1));

        if (ritz_residual <= 0.1 * abs_tol || b <= 1e-14 * std::max(norm_estimate, 1.0) ||
            j + 1 == m || j + 1 == dim - e) {
          break;
        }
        beta.push_back(b);
        V.col(j + 1) = w / b;
      }

      x.noalias() = V.leftCols(steps) * y;
      project_out(x, locked, e);
      x.normalize();
      apply(x, hx);
      theta = x.dot(hx);
      const double residual = (hx - theta * x).norm();
      best_residual = std::min(best_residual, residual);
      if (residual <= abs_tol) {
        locked.col(e) = x;
        found.push_back({theta, x, residual});
        done = true;
      } else {
        v = x;
      }
    }
    if (!done) {
      throw ConvergenceError("Lanczos did not converge for eigenpair " + std::to_string(e) +
                                 " (residual " + std::to_string(best_residual) + ")",
                             best_residual);
    }
  }

  std::stable_sort(found.begin(), found.end(),
                   [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
  return found;
}

}  // namespace s1d
