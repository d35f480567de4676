#pragma once

// Dense linear algebra and quantum-information primitives for chains of
// spin-1 sites. Site 0 is the leftmost tensor factor (slowest-varying index)
// and the local basis is ordered m = +1, 0, -1.

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace s1d {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Matrix3c = Eigen::Matrix3cd;

inline constexpr int kLocalDim = 3;

/// Tolerances shared by every entropy routine.
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kNegativeEigenTol = 1e-10;
inline constexpr double kZeroEigenClamp = 1e-12;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct HermiticityError : std::domain_error {
  using std::domain_error::domain_error;
};
struct PositivityError : std::domain_error {
  using std::domain_error::domain_error;
};
struct TraceError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Raised when supp(rho) is not contained in supp(sigma). Kept separate from
/// numeric failures so callers can treat it as +infinity.
struct InfiniteRelativeEntropy : std::domain_error {
  using std::domain_error::domain_error;
};

/// 3^k, throwing on overflow of the index type.
std::int64_t local_power(int sites);

/// Number of spin-1 sites k with 3^k == dim, or -1.
int sites_for_dimension(std::int64_t dim);

/// Pure state on a chain of spin-1 sites, unit norm.
class StateVector {
 public:
  StateVector(CVector amplitudes);

  /// Rescales to unit norm; throws on a zero vector.
  static StateVector normalized(CVector amplitudes);

  const CVector& amplitudes() const { return amps_; }
  int site_count() const { return sites_; }
  Eigen::Index dim() const { return amps_.size(); }

 private:
  CVector amps_;
  int sites_ = 0;
};

/// Hermitian, unit-trace, positive semidefinite matrix on 3^k dimensions.
/// The spectrum is computed once at construction (or supplied by a caller
/// that already knows it) and kept alongside the matrix.
class DensityMatrix {
 public:
  /// Validates Hermiticity, trace and positivity.
  explicit DensityMatrix(CMatrix data);

  /// Trusted construction from a matrix whose eigenvalues are already known
  /// (Gibbs states, dephased states). Hermiticity and trace are still checked.
  static DensityMatrix with_spectrum(CMatrix data, RVector eigenvalues);

  static DensityMatrix from_pure(const StateVector& psi);

  const CMatrix& matrix() const { return data_; }
  const RVector& eigenvalues() const { return eigenvalues_; }
  int site_count() const { return sites_; }
  Eigen::Index dim() const { return data_.rows(); }

 private:
  DensityMatrix(CMatrix data, RVector eigenvalues, int sites);

  CMatrix data_;
  RVector eigenvalues_;
  int sites_ = 0;
};

/// Kronecker product, `a` acting on the leading subsystem.
CMatrix tensor_product(const CMatrix& a, const CMatrix& b);
DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b);

/// Reduced state on `keep` (ascending site order in the result).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

/// Entropy in bits of a spectrum, applying the eigenvalue clamp.
double spectrum_entropy(const RVector& eigenvalues);

/// Shannon entropy in bits of a probability vector (entries below the clamp
/// contribute zero).
double shannon_entropy(const RVector& probabilities);

double von_neumann_entropy(const DensityMatrix& rho);

/// S(rho || sigma) = Tr[rho log2 rho] - Tr[rho log2 sigma].
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Applies a 3x3 operator to one site of every column of `states`
/// (each column is a vector of length 3^sites).
void apply_site_operator(CMatrix& states, int sites, int site, const Matrix3c& op);

/// Applies op^T from the right on one site, i.e. rows of `m` are transformed
/// as row-vectors: m <- m * (I x op x I).
void apply_site_operator_right(CMatrix& m, int sites, int site, const Matrix3c& op);

/// Single-site reduced density matrices of a pure state (one per site).
std::vector<Matrix3c> single_site_states(const StateVector& psi);

}  // namespace s1d
