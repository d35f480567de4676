#include "s1d/spline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace s1d {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
constexpr double kTieFraction = 1e-2;
}  // namespace

SmoothingSpline SmoothingSpline::fit(std::span<const double> x, std::span<const double> y, double max_edf) {
  if (x.size() != y.size()) throw std::invalid_argument("spline: x and y differ in length");
  const std::size_t n_in = x.size();
  std::vector<std::size_t> order(n_in);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&x](auto a, auto b) { return x[a] < x[b]; });

  // Abscissae closer than a small fraction of the median gap are merged.
  // Near-coincident knots make the penalty matrix too ill-conditioned for
  // the eigen decomposition below.
  std::vector<double> gaps;
  for (std::size_t k = 1; k < n_in; ++k) gaps.push_back(x[order[k]] - x[order[k - 1]]);
  double tie = 0.0;
  if (!gaps.empty()) {
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    tie = kTieFraction * gaps[gaps.size() / 2];
  }
  const double span = n_in ? x[order.back()] - x[order.front()] : 0.0;
  tie = std::max(tie, 1e-12 * std::max(span, 1.0));

  // merge ties: knot abscissa, weighted mean, weight, member list
  std::vector<double> knots, means, weights;
  std::vector<std::size_t> group_of(n_in);
  for (std::size_t k = 0; k < n_in; ++k) {
    const std::size_t i = order[k];
    if (knots.empty() || x[i] - knots.back() > tie) {
      knots.push_back(x[i]);
      means.push_back(0.0);
      weights.push_back(0.0);
    }
    means.back() += y[i];
    weights.back() += 1.0;
    group_of[i] = knots.size() - 1;
  }
  const auto n = static_cast<Eigen::Index>(knots.size());
  if (n < 3) throw std::invalid_argument("spline: need at least three distinct abscissae");
  for (Eigen::Index i = 0; i < n; ++i) means[i] /= weights[i];

  VectorXd h(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) h(i) = knots[i + 1] - knots[i];

  // Green & Silverman: K = Q R^{-1} Q^T
  MatrixXd q = MatrixXd::Zero(n, n - 2);
  MatrixXd r = MatrixXd::Zero(n - 2, n - 2);
  for (Eigen::Index j = 0; j < n - 2; ++j) {
    q(j, j) = 1.0 / h(j);
    q(j + 1, j) = -1.0 / h(j) - 1.0 / h(j + 1);
    q(j + 2, j) = 1.0 / h(j + 1);
    r(j, j) = (h(j) + h(j + 1)) / 3.0;
    if (j + 1 < n - 2) {
      r(j, j + 1) = h(j + 1) / 6.0;
      r(j + 1, j) = h(j + 1) / 6.0;
    }
  }
  const MatrixXd k = q * r.ldlt().solve(q.transpose());

  // weighted problem in scaled coordinates z = W^{1/2} g
  VectorXd sw(n), ybar(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sw(i) = std::sqrt(weights[i]);
    ybar(i) = means[i];
  }
  const MatrixXd kt = sw.cwiseInverse().asDiagonal() * k * sw.cwiseInverse().asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (kt + kt.transpose()));
  const VectorXd mu = es.eigenvalues().cwiseMax(0.0);
  const VectorXd c = es.eigenvectors().transpose() * sw.cwiseProduct(ybar);

  double within = 0.0;  // scatter inside tie groups, independent of lambda
  for (std::size_t i = 0; i < n_in; ++i) {
    const double d = y[i] - means[group_of[i]];
    within += d * d;
  }
  const double n_total = static_cast<double>(n_in);

  // scale lambda by the typical penalty eigenvalue so the search is unitless
  const double mu_scale = std::max(mu.maxCoeff(), 1e-300);
  auto evaluate = [&](double log_lambda, double* rss_out, double* edf_out) {
    const double lam = std::exp(log_lambda) / mu_scale;
    double rss = within, tr = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double shrink = lam * mu(i) / (1.0 + lam * mu(i));
      rss += shrink * shrink * c(i) * c(i);
      tr += 1.0 / (1.0 + lam * mu(i));
    }
    const double denom = 1.0 - tr / n_total;
    if (rss_out) *rss_out = rss;
    if (edf_out) *edf_out = tr;
    if (tr > max_edf) return std::numeric_limits<double>::infinity();
    return denom > 1e-12 ? (rss / n_total) / (denom * denom) : std::numeric_limits<double>::infinity();
  };

  // coarse scan of log(lambda) then golden-section refinement
  const double lo_bound = -35.0, hi_bound = 60.0;
  const int scan = 381;
  double best_ll = lo_bound, best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < scan; ++i) {
    const double ll = lo_bound + (hi_bound - lo_bound) * i / (scan - 1);
    const double v = evaluate(ll, nullptr, nullptr);
    if (v < best_v) {
      best_v = v;
      best_ll = ll;
    }
  }
  const double step = (hi_bound - lo_bound) / (scan - 1);
  double a = std::max(lo_bound, best_ll - step), b = std::min(hi_bound, best_ll + step);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = evaluate(x1, nullptr, nullptr), f2 = evaluate(x2, nullptr, nullptr);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = evaluate(x1, nullptr, nullptr);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = evaluate(x2, nullptr, nullptr);
    }
  }
  double ll = 0.5 * (a + b);
  if (!(evaluate(ll, nullptr, nullptr) <= best_v)) ll = best_ll;
  if (!std::isfinite(best_v)) ll = hi_bound;

  SmoothingSpline s;
  s.gcv_ = evaluate(ll, &s.rss_, &s.edf_);
  s.lambda_ = std::exp(ll) / mu_scale;
  VectorXd shrunk(n);
  for (Eigen::Index i = 0; i < n; ++i) shrunk(i) = c(i) / (1.0 + s.lambda_ * mu(i));
  const VectorXd g = (es.eigenvectors() * shrunk).cwiseQuotient(sw);
  s.fitted_.resize(static_cast<Eigen::Index>(n_in));
  for (std::size_t i = 0; i < n_in; ++i) s.fitted_(static_cast<Eigen::Index>(i)) = g(group_of[i]);
  return s;
}

}  // namespace s1d
