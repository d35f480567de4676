#pragma once

// Orthonormal measurement bases for a spin-1 site and the local dephasing
// channels they induce.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "s1d/qalgebra.hpp"

namespace s1d {

/// Angles of a general spin-1 basis. Every generator involved has an integer
/// spectrum, so each angle is 2*pi periodic.
struct MeasurementAngles {
  double theta = 0.0;
  double phi = 0.0;
  double psi = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double phi0 = 0.0;

  /// All angles reduced to [0, 2*pi).
  MeasurementAngles wrapped() const;
  bool is_finite() const;

  /// (theta, alpha, beta, gamma, psi, phi, phi0), the reporting order.
  std::array<double, 7> ordered() const;

  static MeasurementAngles real(double theta, double alpha, double beta) {
    MeasurementAngles a;
    a.theta = theta;
    a.alpha = alpha;
    a.beta = beta;
    return a;
  }

  friend bool operator==(const MeasurementAngles&, const MeasurementAngles&) = default;
};

/// Three orthonormal vectors; column k is |m_A> for canonical index k
/// (m = +1, 0, -1).
class ProjectiveBasis {
 public:
  explicit ProjectiveBasis(const Matrix3c& vectors);

  const Matrix3c& vectors() const { return u_; }
  Eigen::Vector3cd vector(int k) const { return u_.col(k); }
  Matrix3c projector(int k) const { return u_.col(k) * u_.col(k).adjoint(); }

  static ProjectiveBasis canonical() { return ProjectiveBasis(Matrix3c::Identity()); }

 private:
  Matrix3c u_;
};

/// exp(i * t * G) for a Hermitian 3x3 generator G, through its
/// eigendecomposition.
Matrix3c hermitian_exponential(const Matrix3c& generator, double t);

/// |m_A> = e^{-i psi Sx} e^{-i theta Sy} e^{-i phi Sz}
///         exp[i(gamma Sz^2 - gamma - phi0 Sz)] exp[-i alpha (SxSy + SySx)]
///         exp[(i beta / sqrt 2)(Sy + SySz + SzSy)] |m>
ProjectiveBasis basis_from_angles(const MeasurementAngles& a);

/// Subfamily with gamma = psi = phi = phi0 = 0. All vectors are real.
ProjectiveBasis real_basis_from_angles(double theta, double alpha, double beta);

/// Distance between the projector sets of two bases, minimized over
/// relabelings of the outcomes (sum of Frobenius norms).
double basis_distance(const ProjectiveBasis& a, const ProjectiveBasis& b);

/// Bloch vector <m_A| S |m_A> of basis vector k.
Eigen::Vector3d bloch_vector(const ProjectiveBasis& basis, int k);

/// Tries to express `basis` as (theta, 0, 0) with theta in [0, pi). Returns
/// the fitted theta when the projector-set distance is below `tolerance`.
std::optional<double> fit_rotation_only(const ProjectiveBasis& basis, double tolerance);

/// Diagonal of W^dagger rho W with W the product of the per-site bases
/// (outcome probabilities of the product measurement).
RVector dephased_probabilities(const DensityMatrix& rho, std::span<const ProjectiveBasis> bases);
RVector dephased_probabilities(const StateVector& psi, std::span<const ProjectiveBasis> bases);

/// Probabilities of a single-site measurement on a 3x3 state.
Eigen::Vector3d local_probabilities(const Matrix3c& rho, const ProjectiveBasis& basis);

/// Pi(rho) = sum_m P_m rho P_m for the product measurement, one basis per site.
DensityMatrix dephase(const DensityMatrix& rho, std::span<const ProjectiveBasis> bases);

}  // namespace s1d
