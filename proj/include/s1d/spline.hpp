#pragma once

#include <limits>
#include <span>

#include <Eigen/Dense>

namespace s1d {

/// Cubic smoothing spline minimizing
///   sum_i (y_i - g(x_i))^2 + lambda * int g''(x)^2 dx
/// with lambda chosen by generalized cross-validation. Points sharing an
/// abscissa (or nearly so, relative to the median gap) are merged into
/// weighted means.
class SmoothingSpline {
 public:
  /// x need not be sorted. At least three distinct abscissae are required.
  /// lambda is restricted to fits with at most max_edf effective degrees of
  /// freedom.
  static SmoothingSpline fit(std::span<const double> x, std::span<const double> y,
                             double max_edf = std::numeric_limits<double>::infinity());

  double lambda() const { return lambda_; }
  /// Sum of squared residuals over all input points.
  double residual_sum_squares() const { return rss_; }
  double gcv_score() const { return gcv_; }
  double effective_dof() const { return edf_; }
  /// Fitted value at each input point, in input order.
  const Eigen::VectorXd& fitted() const { return fitted_; }

 private:
  double lambda_ = 0.0;
  double rss_ = 0.0;
  double gcv_ = 0.0;
  double edf_ = 0.0;
  Eigen::VectorXd fitted_;
};

}  // namespace s1d
