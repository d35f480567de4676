#pragma once

// Brute-force reference implementations used by the unit tests. They work on
// dense matrices built from Kronecker products and explicit index loops and
// share no code with the library.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// basis order m = +1, 0, -1
inline Mat sz() {
  Mat m = Mat::Zero(3, 3);
  m(0, 0) = 1.0;
  m(2, 2) = -1.0;
  return m;
}
inline Mat splus() {
  Mat m = Mat::Zero(3, 3);
  m(0, 1) = std::sqrt(2.0);
  m(1, 2) = std::sqrt(2.0);
  return m;
}
inline Mat sx() { return 0.5 * (splus() + splus().adjoint()); }
inline Mat sy() { return cplx(0.0, -0.5) * (splus() - splus().adjoint()); }

inline Mat site_op(const Mat& op, int site, int sites) {
  Mat out = Mat::Identity(1, 1);
  for (int s = 0; s < sites; ++s) out = kron(out, s == site ? op : Mat::Identity(3, 3));
  return out;
}

inline Mat hamiltonian(int sites, double u, bool periodic) {
  const auto dim = static_cast<Eigen::Index>(std::pow(3, sites));
  Mat h = Mat::Zero(dim, dim);
  const int bonds = periodic ? sites : sites - 1;
  for (int b = 0; b < bonds; ++b) {
    const int i = b, j = (b + 1) % sites;
    for (const Mat& s : {sx(), sy(), sz()}) h += site_op(s, i, sites) * site_op(s, j, sites);
  }
  for (int i = 0; i < sites; ++i) h += u * site_op(sz() * sz(), i, sites);
  return h;
}

// Reduced state of two sites i < j by explicit summation over the rest.
inline Mat reduce_pair(const Mat& rho, int sites, int i, int j) {
  const auto dim = rho.rows();
  auto digit = [sites](Eigen::Index idx, int site) {
    for (int s = sites - 1; s > site; --s) idx /= 3;
    return static_cast<int>(idx % 3);
  };
  Mat out = Mat::Zero(9, 9);
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      bool rest_equal = true;
      for (int s = 0; s < sites && rest_equal; ++s) {
        if (s != i && s != j) rest_equal = digit(a, s) == digit(b, s);
      }
      if (!rest_equal) continue;
      out(3 * digit(a, i) + digit(a, j), 3 * digit(b, i) + digit(b, j)) += rho(a, b);
    }
  }
  return out;
}

inline double entropy_bits(const Mat& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  double s = 0.0;
  for (double p : es.eigenvalues()) {
    if (p > 1e-14) s -= p * std::log2(p);
  }
  return s;
}

inline Mat random_density(std::mt19937_64& rng, int dim, int rank) {
  std::normal_distribution<double> g;
  Mat a(dim, rank);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = cplx(g(rng), g(rng));
  }
  Mat rho = a * a.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline Vec random_state(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = cplx(g(rng), g(rng));
  return v.normalized();
}

// Symmetric discord objective I(rho) - I(Pi(rho)) for bases given as 3x3
// unitaries whose columns are the measurement vectors.
inline double mutual_info(const Mat& rho) {
  const auto idx = [](int a, int b) { return 3 * a + b; };
  Mat ra = Mat::Zero(3, 3), rb = Mat::Zero(3, 3);
  for (int a = 0; a < 3; ++a) {
    for (int a2 = 0; a2 < 3; ++a2) {
      for (int b = 0; b < 3; ++b) {
        ra(a, a2) += rho(idx(a, b), idx(a2, b));
        rb(a, a2) += rho(idx(b, a), idx(b, a2));
      }
    }
  }
  return entropy_bits(ra) + entropy_bits(rb) - entropy_bits(rho);
}

inline Mat dephase_pair(const Mat& rho, const Mat& ua, const Mat& ub) {
  Mat out = Mat::Zero(9, 9);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const Mat pa = ua.col(a) * ua.col(a).adjoint();
      const Mat pb = ub.col(b) * ub.col(b).adjoint();
      const Mat p = kron(pa, pb);
      out += p * rho * p;
    }
  }
  return out;
}

inline double symmetric_objective(const Mat& rho, const Mat& ua, const Mat& ub) {
  return mutual_info(rho) - mutual_info(dephase_pair(rho, ua, ub));
}

// Real rotation about y by theta, the simplest member of the real family.
inline Mat rotation_y(double theta) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sy());
  Vec phases(3);
  for (int k = 0; k < 3; ++k) phases(k) = std::exp(cplx(0.0, -theta * es.eigenvalues()(k)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace oracle
