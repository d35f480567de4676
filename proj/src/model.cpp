#include "s1d/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace s1d {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct SectorLowest {
  int magnetization = 0;
  std::vector<std::int64_t> states;
  std::vector<double> values;
  std::vector<VectorXd> vectors;
};

SectorLowest sector_lowest(const SparseHamiltonian& h, int magnetization, int count,
                           const GroundStateOptions& opts) {
  SectorBlock block = h.sector(magnetization);
  SectorLowest out;
  out.magnetization = magnetization;
  const auto dim = static_cast<Eigen::Index>(block.states.size());
  count = std::min<int>(count, static_cast<int>(dim));
  if (dim <= opts.dense_threshold) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es{MatrixXd(block.matrix)};
    for (int k = 0; k < count; ++k) {
      out.values.push_back(es.eigenvalues()(k));
      out.vectors.push_back(es.eigenvectors().col(k));
    }
  } else {
    LanczosOptions lo = opts.lanczos;
    lo.seed += static_cast<std::uint64_t>(magnetization + kMaxSparseLength);
    const SparseReal& m = block.matrix;
    auto pairs = lanczos_lowest(
        [&m](const VectorXd& x, VectorXd& y) { y.noalias() = m * x; }, dim, count,
        h.norm_estimate(), lo);
    for (auto& p : pairs) {
      out.values.push_back(p.value);
      out.vectors.push_back(std::move(p.vector));
    }
  }
  out.states = std::move(block.states);
  return out;
}

int default_sector_cap(int length) { return length <= 10 ? length : 1; }

int sector_cap(const SparseHamiltonian& h, const GroundStateOptions& opts) {
  const int cap = opts.max_abs_magnetization < 0 ? default_sector_cap(h.length())
                                                 : opts.max_abs_magnetization;
  return std::min(cap, h.length());
}

void check_pair(int length, int i, int j) {
  if (i < 0 || j >= length || i >= j) {
    throw DimensionError("pair (" + std::to_string(i) + ", " + std::to_string(j) +
                         ") invalid for L = " + std::to_string(length));
  }
}

}  // namespace

std::string to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

Boundary boundary_from_string(const std::string& s) {
  if (s == "open") return Boundary::open;
  if (s == "periodic") return Boundary::periodic;
  throw std::invalid_argument("unknown boundary '" + s + "'");
}

const SpinOperators& spin_operators() {
  static const SpinOperators ops = [] {
    const double r = 1.0 / std::sqrt(2.0);
    const cplx i(0.0, 1.0);
    SpinOperators s;
    s.sx << 0, r, 0, r, 0, r, 0, r, 0;
    s.sy << 0, -i * r, 0, i * r, 0, -i * r, 0, i * r, 0;
    s.sz << 1, 0, 0, 0, 0, 0, 0, 0, -1;
    return s;
  }();
  return ops;
}

// ---------------------------------------------------------------------------

SparseHamiltonian::SparseHamiltonian(int length, double anisotropy, Boundary boundary)
    : length_(length), anisotropy_(anisotropy), boundary_(boundary) {
  if (length < 2) throw std::invalid_argument("chain length must be at least 2");
  if (length > kMaxSparseLength) {
    throw CapError("L = " + std::to_string(length) + " exceeds the sparse cap L <= " +
                   std::to_string(kMaxSparseLength));
  }
  if (boundary == Boundary::periodic && length < 3) {
    throw std::invalid_argument("periodic boundary needs L >= 3; use open for L = 2");
  }
  for (int i = 0; i + 1 < length; ++i) bonds_.emplace_back(i, i + 1);
  if (boundary == Boundary::periodic) bonds_.emplace_back(length - 1, 0);
}

double SparseHamiltonian::norm_estimate() const {
  return 3.0 * static_cast<double>(bonds_.size()) + std::abs(anisotropy_) * length_;
}

SectorBlock SparseHamiltonian::sector(int magnetization) const {
  if (std::abs(magnetization) > length_) throw std::invalid_argument("magnetization out of range");
  const std::int64_t d = dim();
  const int n = length_;
  std::vector<std::int64_t> stride(n);
  for (int s = 0; s < n; ++s) stride[s] = local_power(n - 1 - s);

  SectorBlock block;
  block.magnetization = magnetization;
  std::vector<int> digits(n, 0);
  // enumerate in ascending index order with an odometer
  int m_total = n;  // all digits 0 -> m = +1 on every site
  for (std::int64_t f = 0; f < d; ++f) {
    if (m_total == magnetization) block.states.push_back(f);
    for (int s = n - 1; s >= 0; --s) {
      if (digits[s] < 2) {
        ++digits[s];
        --m_total;
        break;
      }
      digits[s] = 0;
      m_total += 2;
    }
  }

  const auto& states = block.states;
  const auto rows = static_cast<Eigen::Index>(states.size());
  auto lookup = [&states](std::int64_t f) {
    return static_cast<Eigen::Index>(std::lower_bound(states.begin(), states.end(), f) -
                                     states.begin());
  };

  SparseReal mat(rows, rows);
  mat.reserve(static_cast<Eigen::Index>(rows * (2 * bonds_.size() + 1) / 2 + rows));
  std::vector<std::pair<Eigen::Index, double>> entries;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::int64_t f = states[r];
    for (int s = 0; s < n; ++s) digits[s] = static_cast<int>((f / stride[s]) % kLocalDim);
    entries.clear();
    double diag = 0.0;
    for (int s = 0; s < n; ++s) {
      const int m = local_magnetization(digits[s]);
      diag += anisotropy_ * m * m;
    }
    for (auto [i, j] : bonds_) {
      const int di = digits[i], dj = digits[j];
      diag += local_magnetization(di) * local_magnetization(dj);
      // (S+_i S-_j + S-_i S+_j)/2 has unit matrix elements for spin 1
      if (di > 0 && dj < 2) entries.emplace_back(lookup(f - stride[i] + stride[j]), 1.0);
      if (di < 2 && dj > 0) entries.emplace_back(lookup(f + stride[i] - stride[j]), 1.0);
    }
    entries.emplace_back(r, diag);
    std::sort(entries.begin(), entries.end());
    mat.startVec(r);
    for (std::size_t k = 0; k < entries.size();) {
      const Eigen::Index c = entries[k].first;
      double v = 0.0;
      while (k < entries.size() && entries[k].first == c) v += entries[k++].second;
      if (v != 0.0 || c == r) mat.insertBack(r, c) = v;
    }
  }
  mat.finalize();
  block.matrix = std::move(mat);
  return block;
}

SparseReal SparseHamiltonian::full_matrix() const {
  if (length_ > 10) throw CapError("full_matrix is limited to L <= 10");
  std::vector<Eigen::Triplet<double>> trips;
  for (int m = -length_; m <= length_; ++m) {
    SectorBlock b = sector(m);
    for (Eigen::Index r = 0; r < b.matrix.outerSize(); ++r) {
      for (SparseReal::InnerIterator it(b.matrix, r); it; ++it) {
        trips.emplace_back(b.states[it.row()], b.states[it.col()], it.value());
      }
    }
  }
  SparseReal full(dim(), dim());
  full.setFromTriplets(trips.begin(), trips.end());
  return full;
}

SparseHamiltonian build_hamiltonian(int length, double anisotropy, Boundary boundary) {
  return SparseHamiltonian(length, anisotropy, boundary);
}

// ---------------------------------------------------------------------------

GroundState ground_state(const SparseHamiltonian& h, const GroundStateOptions& opts) {
  const int cap = sector_cap(h, opts);
  std::vector<SectorLowest> sectors;
  for (int m = 0; m <= cap; ++m) sectors.push_back(sector_lowest(h, m, m == 0 ? 2 : 1, opts));

  std::size_t best = 0;
  for (std::size_t s = 1; s < sectors.size(); ++s) {
    if (sectors[s].values[0] < sectors[best].values[0]) best = s;
  }
  if (best != 0 && sectors[best].values.size() < 2) {
    sectors[best] = sector_lowest(h, sectors[best].magnetization, 2, opts);
  }

  const double e0 = sectors[best].values[0];
  double next = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < sectors.size(); ++s) {
    const auto& vals = sectors[s].values;
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (s == best && k == 0) continue;
      next = std::min(next, vals[k]);
    }
    // the spin-flipped sector -M carries the same spectrum
    if (sectors[s].magnetization != 0) next = std::min(next, vals[0]);
  }

  const auto& sec = sectors[best];
  VectorXd v = sec.vectors[0];
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) v = -v;
  CVector full = CVector::Zero(h.dim());
  for (std::size_t a = 0; a < sec.states.size(); ++a) full(sec.states[a]) = v(a);

  const double gap = next - e0;
  return GroundState{e0, StateVector::normalized(std::move(full)), gap < kDegeneracyGap,
                     sec.magnetization, gap};
}

SpectrumSlice low_spectrum(const SparseHamiltonian& h, int k, const GroundStateOptions& opts) {
  if (k < 1) throw std::invalid_argument("low_spectrum: k must be positive");
  if (k >= h.dim()) throw std::invalid_argument("low_spectrum: k must be below 3^L");
  const int cap = sector_cap(h, opts);
  std::vector<double> levels;
  for (int m = 0; m <= cap; ++m) {
    const auto sec = sector_lowest(h, m, k + 1, opts);
    for (double e : sec.values) {
      levels.push_back(e);
      if (m != 0) levels.push_back(e);
    }
  }
  std::sort(levels.begin(), levels.end());
  SpectrumSlice out;
  for (int q = 0; q < k; ++q) {
    out.energies.push_back(levels[q]);
    const bool has_next = q + 1 < static_cast<int>(levels.size());
    out.degeneracy_flags.push_back(has_next && levels[q + 1] - levels[q] < kDegeneracyGap);
  }
  return out;
}

// ---------------------------------------------------------------------------

FullSpectrum::FullSpectrum(const SparseHamiltonian& h) : length_(h.length()) {
  if (h.length() > kMaxDenseLength) {
    throw CapError("dense diagonalization is limited to L <= " + std::to_string(kMaxDenseLength));
  }
  ground_energy_ = std::numeric_limits<double>::infinity();
  for (int m = -length_; m <= length_; ++m) {
    SectorBlock b = h.sector(m);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es{MatrixXd(b.matrix)};
    if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
    ground_energy_ = std::min(ground_energy_, es.eigenvalues()(0));
    blocks_.push_back({m, std::move(b.states), es.eigenvalues(), es.eigenvectors()});
  }
}

Eigen::VectorXd FullSpectrum::energies() const {
  std::vector<double> all;
  for (const auto& b : blocks_) all.insert(all.end(), b.energies.begin(), b.energies.end());
  std::sort(all.begin(), all.end());
  return Eigen::Map<VectorXd>(all.data(), static_cast<Eigen::Index>(all.size()));
}

DensityMatrix thermal_state(const FullSpectrum& spectrum, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw std::invalid_argument("temperature must be positive and finite");
  }
  const std::int64_t d = local_power(spectrum.length());
  double z = 0.0;
  for (const auto& b : spectrum.blocks()) {
    z += (-(b.energies.array() - spectrum.ground_energy()) / temperature).exp().sum();
  }
  CMatrix rho = CMatrix::Zero(d, d);
  RVector weights(d);
  Eigen::Index filled = 0;
  for (const auto& b : spectrum.blocks()) {
    const VectorXd w = (-(b.energies.array() - spectrum.ground_energy()) / temperature).exp() / z;
    const MatrixXd block = b.vectors * w.asDiagonal() * b.vectors.transpose();
    for (std::size_t r = 0; r < b.states.size(); ++r) {
      for (std::size_t c = 0; c < b.states.size(); ++c) {
        rho(b.states[r], b.states[c]) = block(r, c);
      }
    }
    weights.segment(filled, w.size()) = w;
    filled += w.size();
  }
  return DensityMatrix::with_spectrum(std::move(rho), std::move(weights));
}

DensityMatrix thermal_state(const SparseHamiltonian& h, double temperature) {
  return thermal_state(FullSpectrum(h), temperature);
}

DensityMatrix reduced_pair_state(const StateVector& psi, int i, int j) {
  const int n = psi.site_count();
  check_pair(n, i, j);
  const std::int64_t si = local_power(n - 1 - i), sj = local_power(n - 1 - j);
  const auto& v = psi.amplitudes();
  Eigen::Matrix<cplx, 9, 9> r = Eigen::Matrix<cplx, 9, 9>::Zero();
  for (std::int64_t f = 0; f < v.size(); ++f) {
    const cplx amp = v(f);
    if (amp == cplx(0.0)) continue;
    const int di = static_cast<int>((f / si) % kLocalDim);
    const int dj = static_cast<int>((f / sj) % kLocalDim);
    const std::int64_t rest = f - di * si - dj * sj;
    for (int bi = 0; bi < kLocalDim; ++bi) {
      for (int bj = 0; bj < kLocalDim; ++bj) {
        r(di * 3 + dj, bi * 3 + bj) += amp * std::conj(v(rest + bi * si + bj * sj));
      }
    }
  }
  CMatrix out = 0.5 * (r + r.adjoint());
  return DensityMatrix(std::move(out));
}

DensityMatrix reduced_pair_state(const DensityMatrix& rho, int i, int j) {
  check_pair(rho.site_count(), i, j);
  const int keep[2] = {i, j};
  return partial_trace(rho, keep);
}

}  // namespace s1d
