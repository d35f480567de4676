#include "s1d/crit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "s1d/spline.hpp"

namespace s1d {

namespace {

constexpr double kUniformTol = 1e-12;

struct Quadratic {
  double c0, c1, c2;  // in powers of (x - center)
  double center;
};

Quadratic fit_quadratic(const Curve& c) {
  const auto n = static_cast<Eigen::Index>(c.xs.size());
  if (n < 3) throw std::invalid_argument("quadratic fit needs at least three points in window");
  const double center = 0.5 * (c.xs.front() + c.xs.back());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = c.xs[i] - center;
    a(i, 0) = 1.0;
    a(i, 1) = t;
    a(i, 2) = t * t;
    b(i) = c.ys[i];
  }
  const Eigen::Vector3d coef = a.colPivHouseholderQr().solve(b);
  return {coef(0), coef(1), coef(2), center};
}

/// Roots of q1 - q2 inside [lo, hi].
std::vector<double> intersections(const Quadratic& q1, const Quadratic& q2, double lo, double hi) {
  // express both around the same center
  const double c = q1.center;
  const double d = q2.center - c;  // q2(x) with t2 = t - d
  const double a2 = q1.c2 - q2.c2;
  const double a1 = q1.c1 - (q2.c1 - 2.0 * q2.c2 * d);
  const double a0 = q1.c0 - (q2.c0 - q2.c1 * d + q2.c2 * d * d);
  const double scale = std::max({std::abs(a0), std::abs(a1), std::abs(a2), 1e-300});

  std::vector<double> roots;
  if (std::abs(a2) <= 1e-13 * scale) {
    if (std::abs(a1) <= 1e-13 * scale) return roots;  // parallel or identical
    roots.push_back(-a0 / a1);
  } else {
    const double disc = a1 * a1 - 4.0 * a2 * a0;
    if (disc < 0.0) return roots;
    const double sq = std::sqrt(disc);
    // numerically stable pair
    const double qq = -0.5 * (a1 + std::copysign(sq, a1));
    if (qq != 0.0) roots.push_back(a0 / qq);
    roots.push_back(qq / a2);
  }
  std::vector<double> inside;
  for (double t : roots) {
    const double x = t + c;
    if (x >= lo - 1e-12 && x <= hi + 1e-12) inside.push_back(x);
  }
  return inside;
}

}  // namespace

void Curve::validate(std::size_t min_points) const {
  if (xs.size() != ys.size()) throw std::invalid_argument("curve: xs and ys differ in length");
  if (xs.size() < min_points) {
    throw std::invalid_argument("curve: need at least " + std::to_string(min_points) + " points");
  }
  if (xs.size() < 2) return;
  const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  if (!(h > 0.0)) throw std::invalid_argument("curve: grid must be strictly ascending");
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (std::abs((xs[i + 1] - xs[i]) - h) > kUniformTol * std::max(1.0, std::abs(h)) + 1e-12) {
      throw std::invalid_argument("curve: grid is not uniform");
    }
  }
}

double Curve::step() const {
  return (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
}

Curve Curve::window(double lo, double hi) const {
  Curve out{{}, {}, L, boundary, pair, mode};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] >= lo - 1e-12 && xs[i] <= hi + 1e-12) {
      out.xs.push_back(xs[i]);
      out.ys.push_back(ys[i]);
    }
  }
  return out;
}

Curve derivative(const Curve& curve, int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("derivative order must be 1 or 2");
  curve.validate(static_cast<std::size_t>(order) + 2);
  const double h = curve.step();
  const auto& y = curve.ys;
  const std::size_t n = y.size();
  Curve out = curve;
  if (order == 1) {
    out.ys[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
    out.ys[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) out.ys[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
  } else {
    const double h2 = h * h;
    out.ys[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / h2;
    out.ys[n - 1] = (2.0 * y[n - 1] - 5.0 * y[n - 2] + 4.0 * y[n - 3] - y[n - 4]) / h2;
    for (std::size_t i = 1; i + 1 < n; ++i) out.ys[i] = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / h2;
  }
  return out;
}

Peak peak_location(const Curve& curve, double lo, double hi) {
  const Curve w = curve.window(lo, hi);
  if (w.xs.size() < 3) throw std::invalid_argument("peak window must contain at least 3 points");
  const auto it = std::max_element(w.ys.begin(), w.ys.end());
  const auto k = static_cast<std::size_t>(it - w.ys.begin());
  if (k == 0 || k + 1 == w.ys.size()) return {w.xs[k], w.ys[k], true};

  const double ym = w.ys[k - 1], y0 = w.ys[k], yp = w.ys[k + 1];
  const double h = w.xs[k + 1] - w.xs[k];
  const double denom = ym - 2.0 * y0 + yp;
  if (denom >= 0.0) return {w.xs[k], y0, false};
  const double offset = 0.5 * (ym - yp) / denom;  // in units of h, |offset| <= 1/2
  const double x = w.xs[k] + offset * h;
  const double y = y0 - 0.25 * (ym - yp) * offset;
  return {x, y, false};
}

Extrapolation extrapolate_critical(std::span<const int> sizes, std::span<const double> peaks,
                                   int drop_below) {
  if (sizes.size() != peaks.size()) throw std::invalid_argument("sizes and peaks differ in length");
  std::vector<std::pair<int, double>> pts;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] >= drop_below) pts.emplace_back(sizes[i], peaks[i]);
  }
  if (pts.size() < 3) throw std::invalid_argument("extrapolation needs at least 3 retained sizes");
  std::sort(pts.begin(), pts.end());

  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = 1.0 / pts[i].first;
    b(i) = pts[i].second;
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  const double rms = std::sqrt((a * coef - b).squaredNorm() / static_cast<double>(n));
  return {coef(0), coef(1), rms, pts.size()};
}

Crossing crossing_point(std::span<const Curve> curves, double lo, double hi) {
  if (curves.size() < 2) throw std::invalid_argument("crossing_point needs at least two curves");
  std::vector<Quadratic> fits;
  for (const auto& c : curves) fits.push_back(fit_quadratic(c.window(lo, hi)));

  Crossing out;
  const double mid = 0.5 * (lo + hi);
  for (std::size_t i = 0; i < fits.size(); ++i) {
    for (std::size_t j = i + 1; j < fits.size(); ++j) {
      const auto roots = intersections(fits[i], fits[j], lo, hi);
      if (roots.empty()) {
        throw NoIntersection("curves L=" + std::to_string(curves[i].L) + " and L=" +
                             std::to_string(curves[j].L) + " do not cross in the window");
      }
      double best = roots.front();
      for (double r : roots) {
        if (std::abs(r - mid) < std::abs(best - mid)) best = r;
      }
      out.pairwise.push_back(best);
    }
  }
  const auto [mn, mx] = std::minmax_element(out.pairwise.begin(), out.pairwise.end());
  out.spread = *mx - *mn;
  out.u_star = std::accumulate(out.pairwise.begin(), out.pairwise.end(), 0.0) /
               static_cast<double>(out.pairwise.size());
  return out;
}

double collapse_cost(std::span<const Curve> curves, double u_c, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
  std::vector<double> x, y;
  // the master curve may not be more flexible than a single curve could resolve
  std::size_t per_curve = std::numeric_limits<std::size_t>::max();
  for (const auto& c : curves) {
    per_curve = std::min(per_curve, c.xs.size());
    const double scale = std::pow(static_cast<double>(c.L), 1.0 / nu);
    for (std::size_t i = 0; i < c.xs.size(); ++i) {
      x.push_back((c.xs[i] - u_c) * scale);
      y.push_back(c.ys[i]);
    }
  }
  const auto spline = SmoothingSpline::fit(x, y, static_cast<double>(per_curve));
  return spline.residual_sum_squares() / static_cast<double>(x.size());
}

ScalingFit fss_collapse(std::span<const Curve> curves, double u_c, double nu_lo, double nu_hi) {
  if (curves.size() < 3) throw std::invalid_argument("collapse needs at least three curves");
  if (!(nu_lo > 0.0) || !(nu_hi > nu_lo)) throw std::invalid_argument("invalid nu range");

  constexpr int kScan = 201;
  std::vector<double> nus(kScan), costs(kScan);
  for (int i = 0; i < kScan; ++i) {
    nus[i] = nu_lo + (nu_hi - nu_lo) * i / (kScan - 1);
    costs[i] = collapse_cost(curves, u_c, nus[i]);
  }
  // strict comparison keeps the smallest nu on ties
  int best = 0;
  for (int i = 1; i < kScan; ++i) {
    if (costs[i] < costs[best]) best = i;
  }

  ScalingFit fit;
  fit.u_c = u_c;
  double nu = nus[best];
  double cost = costs[best];
  const bool at_edge = best == 0 || best == kScan - 1;
  if (!at_edge) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = nus[best - 1], b = nus[best + 1];
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = collapse_cost(curves, u_c, x1), f2 = collapse_cost(curves, u_c, x2);
    for (int it = 0; it < 40; ++it) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - invphi * (b - a);
        f1 = collapse_cost(curves, u_c, x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + invphi * (b - a);
        f2 = collapse_cost(curves, u_c, x2);
      }
    }
    const double xm = 0.5 * (a + b);
    const double fm = collapse_cost(curves, u_c, xm);
    if (fm < cost) {
      nu = xm;
      cost = fm;
    }
  }
  fit.nu = nu;
  fit.residual = cost;

  // curvature of the cost: nu_err is where a quadratic model doubles the cost
  const double delta = (nu_hi - nu_lo) / (kScan - 1);
  const double lo = std::max(nu_lo, nu - delta), hi = std::min(nu_hi, nu + delta);
  const double c_lo = collapse_cost(curves, u_c, lo), c_hi = collapse_cost(curves, u_c, hi);
  const double h1 = nu - lo, h2 = hi - nu;
  double curvature = 0.0;
  if (h1 > 0.0 && h2 > 0.0) {
    curvature = 2.0 * (h1 * (c_hi - cost) + h2 * (c_lo - cost)) / (h1 * h2 * (h1 + h2));
  }
  fit.nu_err = curvature > 0.0 ? std::sqrt(2.0 * cost / curvature)
                               : std::numeric_limits<double>::infinity();
  fit.reliable = !at_edge && curvature > 0.0 && fit.nu_err <= (nu_hi - nu_lo);
  return fit;
}

}  // namespace s1d
