#pragma once

// Critical-point analysis of discord curves: finite differences, peak
// finding, 1/L extrapolation, crossings of second derivatives and
// finite-size-scaling collapse.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace s1d {

struct Curve {
  std::vector<double> xs;  // strictly ascending, uniform spacing
  std::vector<double> ys;
  int L = 0;
  std::string boundary;
  std::string pair;
  std::string mode;

  /// Throws unless the grid is uniform with at least `min_points` samples.
  void validate(std::size_t min_points) const;
  double step() const;
  /// Points with lo <= x <= hi.
  Curve window(double lo, double hi) const;
};

struct NoIntersection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// First or second derivative. Interior points use central differences,
/// endpoints one-sided stencils of second-order accuracy.
Curve derivative(const Curve& curve, int order);

struct Peak {
  double x = 0.0;
  double y = 0.0;
  bool at_edge = false;
};

/// Maximum of the curve inside [lo, hi], refined by a parabola through the
/// largest sample and its neighbours.
Peak peak_location(const Curve& curve, double lo, double hi);

struct Extrapolation {
  double u_c = 0.0;       // intercept at 1/L = 0
  double slope = 0.0;
  double residual = 0.0;  // RMS deviation from the line
  std::size_t used = 0;
};

/// Least-squares line of peak position against 1/L over sizes >= drop_below.
Extrapolation extrapolate_critical(std::span<const int> sizes, std::span<const double> peaks,
                                   int drop_below = 0);

struct Crossing {
  double u_star = 0.0;
  double spread = 0.0;
  std::vector<double> pairwise;
};

/// Mean pairwise intersection of quadratic least-squares fits to the curves
/// restricted to [lo, hi].
Crossing crossing_point(std::span<const Curve> curves, double lo, double hi);

struct ScalingFit {
  double u_c = 0.0;
  double nu = 0.0;
  double nu_err = 0.0;
  double residual = 0.0;
  bool reliable = true;
};

/// Mean squared deviation of the points (U - u_c) L^{1/nu} -> y from one
/// smoothing-spline master curve.
double collapse_cost(std::span<const Curve> curves, double u_c, double nu);

/// Scans nu over [nu_lo, nu_hi] for the best collapse (ties go to smaller nu).
ScalingFit fss_collapse(std::span<const Curve> curves, double u_c, double nu_lo, double nu_hi);

}  // namespace s1d
