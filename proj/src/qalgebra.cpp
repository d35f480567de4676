#include "s1d/qalgebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace s1d {

namespace {

double max_antihermitian_part(const CMatrix& m) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
    }
  }
  return worst;
}

void check_density(const CMatrix& data) {
  if (data.rows() != data.cols()) {
    throw DimensionError("density matrix must be square");
  }
  if (sites_for_dimension(data.rows()) < 0) {
    throw DimensionError("density matrix side " + std::to_string(data.rows()) +
                         " is not a power of 3");
  }
  if (max_antihermitian_part(data) > kHermitianTol) {
    throw HermiticityError("density matrix is not Hermitian");
  }
  const double tr = data.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw TraceError("density matrix trace is " + std::to_string(tr));
  }
}

void check_spectrum(const RVector& ev) {
  if (ev.size() > 0 && ev.minCoeff() < -kNegativeEigenTol) {
    throw PositivityError("density matrix has eigenvalue " + std::to_string(ev.minCoeff()));
  }
}

}  // namespace

std::int64_t local_power(int sites) {
  if (sites < 0 || sites > 38) {
    throw DimensionError("site count out of range: " + std::to_string(sites));
  }
  std::int64_t d = 1;
  for (int i = 0; i < sites; ++i) d *= kLocalDim;
  return d;
}

int sites_for_dimension(std::int64_t dim) {
  if (dim < 1) return -1;
  int k = 0;
  while (dim % kLocalDim == 0) {
    dim /= kLocalDim;
    ++k;
  }
  return dim == 1 ? k : -1;
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(CVector amplitudes) : amps_(std::move(amplitudes)) {
  sites_ = sites_for_dimension(amps_.size());
  if (sites_ < 0) {
    throw DimensionError("state length " + std::to_string(amps_.size()) + " is not a power of 3");
  }
  if (std::abs(amps_.norm() - 1.0) > 1e-12) {
    throw std::domain_error("state vector is not normalized");
  }
}

StateVector StateVector::normalized(CVector amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0)) throw std::domain_error("cannot normalize a zero vector");
  amplitudes /= n;
  return StateVector(std::move(amplitudes));
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(CMatrix data, RVector eigenvalues, int sites)
    : data_(std::move(data)), eigenvalues_(std::move(eigenvalues)), sites_(sites) {}

DensityMatrix::DensityMatrix(CMatrix data) : data_(std::move(data)) {
  check_density(data_);
  sites_ = sites_for_dimension(data_.rows());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(data_, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  eigenvalues_ = es.eigenvalues();
  check_spectrum(eigenvalues_);
}

DensityMatrix DensityMatrix::with_spectrum(CMatrix data, RVector eigenvalues) {
  check_density(data);
  if (eigenvalues.size() != data.rows()) {
    throw DimensionError("spectrum length does not match matrix side");
  }
  check_spectrum(eigenvalues);
  if (std::abs(eigenvalues.sum() - 1.0) > kTraceTol) {
    throw TraceError("supplied spectrum does not sum to one");
  }
  std::sort(eigenvalues.begin(), eigenvalues.end());
  const int sites = sites_for_dimension(data.rows());
  return DensityMatrix(std::move(data), std::move(eigenvalues), sites);
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  const auto& v = psi.amplitudes();
  RVector ev = RVector::Zero(v.size());
  ev(v.size() - 1) = 1.0;
  return DensityMatrix(v * v.adjoint(), std::move(ev), psi.site_count());
}

// ---------------------------------------------------------------------------

CMatrix tensor_product(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw DimensionError("tensor_product requires square operands");
  }
  const Eigen::Index da = a.rows(), db = b.rows();
  CMatrix out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = a(i, j) * b;
    }
  }
  return out;
}

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
  RVector ev(a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i) {
    ev.segment(i * b.dim(), b.dim()) = a.eigenvalues()(i) * b.eigenvalues();
  }
  return DensityMatrix::with_spectrum(tensor_product(a.matrix(), b.matrix()), std::move(ev));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const int n = rho.site_count();
  if (keep.empty()) throw DimensionError("partial_trace: empty keep set");
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) {
    throw DimensionError("partial_trace: duplicate site index");
  }
  if (kept.front() < 0 || kept.back() >= n) {
    throw DimensionError("partial_trace: site index out of range");
  }
  if (static_cast<int>(kept.size()) == n) return rho;

  std::vector<int> traced;
  for (int s = 0, k = 0; s < n; ++s) {
    if (k < static_cast<int>(kept.size()) && kept[k] == s) {
      ++k;
    } else {
      traced.push_back(s);
    }
  }
  const std::int64_t dk = local_power(static_cast<int>(kept.size()));
  const std::int64_t dt = local_power(static_cast<int>(traced.size()));

  // full index of (kept multi-index, traced multi-index)
  auto place = [n](const std::vector<int>& sites, std::int64_t sub) {
    std::int64_t full = 0;
    for (int q = static_cast<int>(sites.size()) - 1; q >= 0; --q) {
      const std::int64_t digit = sub % kLocalDim;
      sub /= kLocalDim;
      full += digit * local_power(n - 1 - sites[q]);
    }
    return full;
  };
  std::vector<std::int64_t> kept_off(dk), traced_off(dt);
  for (std::int64_t i = 0; i < dk; ++i) kept_off[i] = place(kept, i);
  for (std::int64_t t = 0; t < dt; ++t) traced_off[t] = place(traced, t);

  const CMatrix& m = rho.matrix();
  CMatrix red = CMatrix::Zero(dk, dk);
  for (std::int64_t a = 0; a < dk; ++a) {
    for (std::int64_t b = 0; b < dk; ++b) {
      cplx acc = 0.0;
      for (std::int64_t t = 0; t < dt; ++t) {
        acc += m(kept_off[a] + traced_off[t], kept_off[b] + traced_off[t]);
      }
      red(a, b) = acc;
    }
  }
  // enforce exact Hermiticity against summation roundoff
  red = 0.5 * (red + red.adjoint()).eval();
  return DensityMatrix(std::move(red));
}

double spectrum_entropy(const RVector& eigenvalues) {
  double s = 0.0;
  for (double p : eigenvalues) {
    if (p < -kNegativeEigenTol) {
      throw PositivityError("negative eigenvalue " + std::to_string(p) + " in entropy");
    }
    if (p < kZeroEigenClamp) continue;
    s -= p * std::log2(p);
  }
  return s;
}

double shannon_entropy(const RVector& probabilities) { return spectrum_entropy(probabilities); }

double von_neumann_entropy(const DensityMatrix& rho) { return spectrum_entropy(rho.eigenvalues()); }

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError("relative_entropy: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sigma.matrix());
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  const RVector& lam = es.eigenvalues();
  const CMatrix& vecs = es.eigenvectors();
  double cross = 0.0;  // Tr[rho log2 sigma]
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    const double w = (vecs.col(k).adjoint() * rho.matrix() * vecs.col(k))(0, 0).real();
    if (lam(k) < -kNegativeEigenTol) throw PositivityError("sigma has a negative eigenvalue");
    if (lam(k) < kZeroEigenClamp) {
      if (w > kNegativeEigenTol) {
        throw InfiniteRelativeEntropy("support of rho is not contained in support of sigma");
      }
      continue;
    }
    cross += w * std::log2(lam(k));
  }
  return -von_neumann_entropy(rho) - cross;
}

void apply_site_operator(CMatrix& states, int sites, int site, const Matrix3c& op) {
  if (site < 0 || site >= sites) throw DimensionError("site index out of range");
  const std::int64_t stride = local_power(sites - 1 - site);
  const std::int64_t blocks = states.rows() / (kLocalDim * stride);
  if (blocks * kLocalDim * stride != states.rows()) {
    throw DimensionError("state length does not match site count");
  }
  for (Eigen::Index c = 0; c < states.cols(); ++c) {
    cplx* col = states.col(c).data();
    for (std::int64_t b = 0; b < blocks; ++b) {
      cplx* base = col + b * kLocalDim * stride;
      for (std::int64_t in = 0; in < stride; ++in) {
        const cplx x0 = base[in], x1 = base[in + stride], x2 = base[in + 2 * stride];
        base[in] = op(0, 0) * x0 + op(0, 1) * x1 + op(0, 2) * x2;
        base[in + stride] = op(1, 0) * x0 + op(1, 1) * x1 + op(1, 2) * x2;
        base[in + 2 * stride] = op(2, 0) * x0 + op(2, 1) * x1 + op(2, 2) * x2;
      }
    }
  }
}

void apply_site_operator_right(CMatrix& m, int sites, int site, const Matrix3c& op) {
  if (site < 0 || site >= sites) throw DimensionError("site index out of range");
  const std::int64_t stride = local_power(sites - 1 - site);
  const std::int64_t blocks = m.cols() / (kLocalDim * stride);
  if (blocks * kLocalDim * stride != m.cols()) {
    throw DimensionError("matrix width does not match site count");
  }
  // column a of the result = sum_b column b * op(b, a)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const Eigen::Index base = b * kLocalDim * stride;
    for (std::int64_t in = 0; in < stride; ++in) {
      const Eigen::Index c0 = base + in, c1 = c0 + stride, c2 = c1 + stride;
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const cplx x0 = m(r, c0), x1 = m(r, c1), x2 = m(r, c2);
        m(r, c0) = x0 * op(0, 0) + x1 * op(1, 0) + x2 * op(2, 0);
        m(r, c1) = x0 * op(0, 1) + x1 * op(1, 1) + x2 * op(2, 1);
        m(r, c2) = x0 * op(0, 2) + x1 * op(1, 2) + x2 * op(2, 2);
      }
    }
  }
}

std::vector<Matrix3c> single_site_states(const StateVector& psi) {
  const int n = psi.site_count();
  const auto& v = psi.amplitudes();
  std::vector<Matrix3c> out;
  out.reserve(n);
  for (int s = 0; s < n; ++s) {
    const std::int64_t stride = local_power(n - 1 - s);
    const std::int64_t blocks = v.size() / (kLocalDim * stride);
    Matrix3c r = Matrix3c::Zero();
    for (std::int64_t b = 0; b < blocks; ++b) {
      const cplx* base = v.data() + b * kLocalDim * stride;
      for (std::int64_t in = 0; in < stride; ++in) {
        for (int a = 0; a < kLocalDim; ++a) {
          for (int c = 0; c < kLocalDim; ++c) {
            r(a, c) += base[in + a * stride] * std::conj(base[in + c * stride]);
          }
        }
      }
    }
    out.push_back(0.5 * (r + r.adjoint()));
  }
  return out;
}

}  // namespace s1d
