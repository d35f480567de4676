#include "s1d/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "s1d/model.hpp"

namespace s1d {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kUnitarityTol = 1e-12;

/// exp(i t G) from a cached eigendecomposition of G.
struct Exponentiator {
  Matrix3c vecs;
  Eigen::Vector3d vals;

  explicit Exponentiator(const Matrix3c& g) {
    Eigen::SelfAdjointEigenSolver<Matrix3c> es(g);
    vecs = es.eigenvectors();
    vals = es.eigenvalues();
  }

  Matrix3c operator()(double t) const {
    Eigen::Vector3cd phases;
    for (int k = 0; k < 3; ++k) phases(k) = std::polar(1.0, t * vals(k));
    return vecs * phases.asDiagonal() * vecs.adjoint();
  }
};

struct Generators {
  Exponentiator sx, sy, alpha, beta;
};

const Generators& generators() {
  static const Generators g = [] {
    const auto& s = spin_operators();
    const Matrix3c quad_xy = s.sx * s.sy + s.sy * s.sx;
    const Matrix3c quad_y = (s.sy + s.sy * s.sz + s.sz * s.sy) / std::sqrt(2.0);
    return Generators{Exponentiator(s.sx), Exponentiator(s.sy), Exponentiator(quad_xy),
                      Exponentiator(quad_y)};
  }();
  return g;
}

double wrap(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

Matrix3c diagonal_phase(double phi, double gamma, double phi0) {
  // e^{-i phi Sz} exp[i(gamma Sz^2 - gamma - phi0 Sz)], both diagonal
  Matrix3c d = Matrix3c::Zero();
  for (int k = 0; k < 3; ++k) {
    const int m = local_magnetization(k);
    d(k, k) = std::polar(1.0, -phi * m + gamma * (m * m - 1) - phi0 * m);
  }
  return d;
}

CMatrix product_unitary(std::span<const ProjectiveBasis> bases) {
  CMatrix w = CMatrix::Identity(1, 1);
  for (const auto& b : bases) w = tensor_product(w, CMatrix(b.vectors()));
  return w;
}

void check_site_count(Eigen::Index dim, std::size_t count) {
  if (sites_for_dimension(dim) != static_cast<int>(count)) {
    throw DimensionError("need one basis per site: got " + std::to_string(count) +
                         " bases for dimension " + std::to_string(dim));
  }
}

/// W^dagger rho W computed site by site.
CMatrix rotate_into(const CMatrix& rho, std::span<const ProjectiveBasis> bases) {
  const int n = static_cast<int>(bases.size());
  CMatrix m = rho;
  for (int s = 0; s < n; ++s) {
    apply_site_operator(m, n, s, bases[s].vectors().adjoint());
    apply_site_operator_right(m, n, s, bases[s].vectors());
  }
  return m;
}

constexpr Eigen::Index kExplicitProductMax = 81;

}  // namespace

MeasurementAngles MeasurementAngles::wrapped() const {
  MeasurementAngles a;
  a.theta = wrap(theta);
  a.phi = wrap(phi);
  a.psi = wrap(psi);
  a.alpha = wrap(alpha);
  a.beta = wrap(beta);
  a.gamma = wrap(gamma);
  a.phi0 = wrap(phi0);
  return a;
}

bool MeasurementAngles::is_finite() const {
  for (double v : ordered()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::array<double, 7> MeasurementAngles::ordered() const {
  return {theta, alpha, beta, gamma, psi, phi, phi0};
}

ProjectiveBasis::ProjectiveBasis(const Matrix3c& vectors) : u_(vectors) {
  const double err = (u_.adjoint() * u_ - Matrix3c::Identity()).cwiseAbs().maxCoeff();
  if (err > kUnitarityTol) {
    throw std::domain_error("basis vectors are not orthonormal (error " + std::to_string(err) +
                            ")");
  }
}

Matrix3c hermitian_exponential(const Matrix3c& generator, double t) {
  return Exponentiator(generator)(t);
}

ProjectiveBasis basis_from_angles(const MeasurementAngles& a) {
  if (!a.is_finite()) throw std::invalid_argument("measurement angles must be finite");
  const auto& g = generators();
  Matrix3c u = g.sx(-a.psi) * g.sy(-a.theta) * diagonal_phase(a.phi, a.gamma, a.phi0) *
               g.alpha(-a.alpha) * g.beta(a.beta);
  return ProjectiveBasis(u);
}

ProjectiveBasis real_basis_from_angles(double theta, double alpha, double beta) {
  Matrix3c u = basis_from_angles(MeasurementAngles::real(theta, alpha, beta)).vectors();
  if (u.imag().cwiseAbs().maxCoeff() > kUnitarityTol) {
    throw std::logic_error("real-family basis acquired an imaginary part");
  }
  u = u.real().cast<cplx>();
  return ProjectiveBasis(u);
}

double basis_distance(const ProjectiveBasis& a, const ProjectiveBasis& b) {
  std::array<Matrix3c, 3> pa, pb;
  for (int k = 0; k < 3; ++k) {
    pa[k] = a.projector(k);
    pb[k] = b.projector(k);
  }
  std::array<int, 3> perm{0, 1, 2};
  double best = std::numeric_limits<double>::infinity();
  do {
    double d = 0.0;
    for (int k = 0; k < 3; ++k) d += (pa[k] - pb[perm[k]]).norm();
    best = std::min(best, d);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Eigen::Vector3d bloch_vector(const ProjectiveBasis& basis, int k) {
  const auto& s = spin_operators();
  const Eigen::Vector3cd v = basis.vector(k);
  return {(v.adjoint() * s.sx * v)(0, 0).real(), (v.adjoint() * s.sy * v)(0, 0).real(),
          (v.adjoint() * s.sz * v)(0, 0).real()};
}

std::optional<double> fit_rotation_only(const ProjectiveBasis& basis, double tolerance) {
  auto dist = [&basis](double t) {
    return basis_distance(real_basis_from_angles(t, 0.0, 0.0), basis);
  };
  constexpr int kScan = 360;
  const double step = std::numbers::pi / kScan;
  int best_k = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kScan; ++k) {
    const double d = dist(k * step);
    if (d < best_d) {
      best_d = d;
      best_k = k;
    }
  }
  // golden-section search on the bracketing interval
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = (best_k - 1) * step, hi = (best_k + 1) * step;
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  double f1 = dist(x1), f2 = dist(x2);
  while (hi - lo > 1e-13) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = dist(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = dist(x2);
    }
  }
  double theta = 0.5 * (lo + hi);
  double d = dist(theta);
  if (best_d < d) {
    theta = best_k * step;
    d = best_d;
  }
  if (d > tolerance) return std::nullopt;
  theta = std::fmod(theta, std::numbers::pi);
  if (theta < 0) theta += std::numbers::pi;
  if (std::numbers::pi - theta < 1e-12) theta = 0.0;
  return theta;
}

RVector dephased_probabilities(const DensityMatrix& rho, std::span<const ProjectiveBasis> bases) {
  check_site_count(rho.dim(), bases.size());
  if (rho.dim() <= kExplicitProductMax) {
    const CMatrix w = product_unitary(bases);
    const CMatrix r = rho.matrix() * w;
    return (w.conjugate().cwiseProduct(r)).colwise().sum().real().transpose();
  }
  return rotate_into(rho.matrix(), bases).diagonal().real();
}

RVector dephased_probabilities(const StateVector& psi, std::span<const ProjectiveBasis> bases) {
  check_site_count(psi.dim(), bases.size());
  const int n = static_cast<int>(bases.size());
  CMatrix c = psi.amplitudes();
  for (int s = 0; s < n; ++s) apply_site_operator(c, n, s, bases[s].vectors().adjoint());
  return c.col(0).cwiseAbs2();
}

Eigen::Vector3d local_probabilities(const Matrix3c& rho, const ProjectiveBasis& basis) {
  const Matrix3c& u = basis.vectors();
  return (u.conjugate().cwiseProduct(rho * u)).colwise().sum().real().transpose();
}

DensityMatrix dephase(const DensityMatrix& rho, std::span<const ProjectiveBasis> bases) {
  check_site_count(rho.dim(), bases.size());
  RVector p = dephased_probabilities(rho, bases);
  // clip roundoff so the supplied spectrum is exactly nonnegative
  p = p.cwiseMax(0.0);
  p /= p.sum();
  const int n = static_cast<int>(bases.size());
  CMatrix out = p.cast<cplx>().asDiagonal();
  if (rho.dim() <= kExplicitProductMax) {
    const CMatrix w = product_unitary(bases);
    out = w * out * w.adjoint();
  } else {
    for (int s = 0; s < n; ++s) {
      apply_site_operator(out, n, s, bases[s].vectors());
      apply_site_operator_right(out, n, s, bases[s].vectors().adjoint());
    }
  }
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix::with_spectrum(std::move(out), std::move(p));
}

}  // namespace s1d
