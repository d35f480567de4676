#pragma once

// Spin-1 Heisenberg chain with uniaxial anisotropy
//
//   H = sum_<ij> S_i . S_j + U sum_i (S^z_i)^2
//
// in the product S^z basis (m = +1, 0, -1 per site). H conserves total S^z,
// so everything below works sector by sector.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "s1d/lanczos.hpp"
#include "s1d/qalgebra.hpp"

namespace s1d {

enum class Boundary { open, periodic };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

/// Requested system is beyond what the dense or sparse paths support.
struct CapError : std::length_error {
  using std::length_error::length_error;
};

inline constexpr int kMaxSparseLength = 16;
inline constexpr int kMaxDenseLength = 8;

struct SpinOperators {
  Matrix3c sx, sy, sz;
};

/// S^x, S^y, S^z for spin 1 (hbar = 1) in the basis m = +1, 0, -1.
const SpinOperators& spin_operators();

/// m quantum number of local basis index 0, 1, 2.
constexpr int local_magnetization(int digit) { return 1 - digit; }

using SparseReal = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Fixed-magnetization block of the Hamiltonian.
struct SectorBlock {
  int magnetization = 0;
  std::vector<std::int64_t> states;  // ascending full-space indices
  SparseReal matrix;
};

class SparseHamiltonian {
 public:
  SparseHamiltonian(int length, double anisotropy, Boundary boundary);

  int length() const { return length_; }
  double anisotropy() const { return anisotropy_; }
  Boundary boundary() const { return boundary_; }
  std::int64_t dim() const { return local_power(length_); }
  const std::vector<std::pair<int, int>>& bonds() const { return bonds_; }

  /// Gershgorin bound on the spectral radius.
  double norm_estimate() const;

  /// Block with total S^z = magnetization (|magnetization| <= L).
  SectorBlock sector(int magnetization) const;

  /// Full 3^L x 3^L matrix (block diagonal by magnetization).
  SparseReal full_matrix() const;

 private:
  int length_;
  double anisotropy_;
  Boundary boundary_;
  std::vector<std::pair<int, int>> bonds_;
};

/// Throws for L < 2, L > 16, or periodic L = 2 (that bond would be counted
/// twice).
SparseHamiltonian build_hamiltonian(int length, double anisotropy, Boundary boundary);

struct GroundStateOptions {
  LanczosOptions lanczos;
  /// Largest |S^z_total| sector searched; negative selects every sector for
  /// L <= 10 and |M| <= 1 above.
  int max_abs_magnetization = -1;
  /// Sectors up to this dimension are diagonalized densely.
  std::int64_t dense_threshold = 600;
};

inline constexpr double kDegeneracyGap = 1e-9;

struct GroundState {
  double energy = 0.0;
  StateVector state;
  bool degenerate = false;
  int magnetization = 0;
  double gap = 0.0;  // to the next level among the searched sectors
};

/// Lowest eigenpair. At a degeneracy the vector from the lowest |M| sector
/// (then the first converged) is returned and `degenerate` is set.
GroundState ground_state(const SparseHamiltonian& h, const GroundStateOptions& opts = {});

struct SpectrumSlice {
  std::vector<double> energies;      // ascending
  std::vector<bool> degeneracy_flags;  // gap to next level < 1e-9
};

/// The k lowest eigenvalues with multiplicity.
SpectrumSlice low_spectrum(const SparseHamiltonian& h, int k, const GroundStateOptions& opts = {});

/// Complete eigendecomposition, one dense block per magnetization sector.
class FullSpectrum {
 public:
  struct Block {
    int magnetization;
    std::vector<std::int64_t> states;
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;
  };

  explicit FullSpectrum(const SparseHamiltonian& h);

  int length() const { return length_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  double ground_energy() const { return ground_energy_; }
  /// All eigenvalues, ascending.
  Eigen::VectorXd energies() const;

 private:
  int length_;
  std::vector<Block> blocks_;
  double ground_energy_;
};

/// Gibbs state exp(-H/T)/Z (k_B = 1). Dense path, L <= 8.
DensityMatrix thermal_state(const FullSpectrum& spectrum, double temperature);
DensityMatrix thermal_state(const SparseHamiltonian& h, double temperature);

/// Two-site reduced state on sites i < j (9x9, site i leading).
DensityMatrix reduced_pair_state(const StateVector& psi, int i, int j);
DensityMatrix reduced_pair_state(const DensityMatrix& rho, int i, int j);

}  // namespace s1d
