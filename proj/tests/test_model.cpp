#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "s1d/model.hpp"

using namespace s1d;

namespace {

Eigen::VectorXd dense_spectrum(int sites, double u, bool periodic) {
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(oracle::hamiltonian(sites, u, periodic));
  return es.eigenvalues();
}

}  // namespace

TEST_CASE("boundary names") {
  CHECK(to_string(Boundary::periodic) == "periodic");
  CHECK(boundary_from_string("open") == Boundary::open);
  CHECK_THROWS(boundary_from_string("ring"));
}

TEST_CASE("two-site spectrum at U=0") {
  const auto h = build_hamiltonian(2, 0.0, Boundary::open);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(h.full_matrix()));
  const Eigen::VectorXd e = es.eigenvalues();
  CHECK(e(0) == doctest::Approx(-2.0));
  for (int k = 1; k < 4; ++k) CHECK(e(k) == doctest::Approx(-1.0));
  for (int k = 4; k < 9; ++k) CHECK(e(k) == doctest::Approx(1.0));
}

TEST_CASE("sparse matrix matches the Kronecker oracle") {
  for (bool periodic : {false, true}) {
    const auto h = build_hamiltonian(4, 0.7, periodic ? Boundary::periodic : Boundary::open);
    const Eigen::MatrixXd dense(h.full_matrix());
    const oracle::Mat ref = oracle::hamiltonian(4, 0.7, periodic);
    CHECK((dense.cast<oracle::cplx>() - ref).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("all-zero configuration has zero energy") {
  const auto h = build_hamiltonian(5, 3.0, Boundary::periodic);
  const Eigen::MatrixXd dense(h.full_matrix());
  // |0 0 0 0 0> is index sum 3^k over all sites with digit 1
  std::int64_t idx = 0;
  for (int s = 0; s < 5; ++s) idx = 3 * idx + 1;
  CHECK(std::abs(dense(idx, idx)) < 1e-14);
}

TEST_CASE("sectors conserve magnetization and cover the space") {
  const auto h = build_hamiltonian(4, -0.4, Boundary::periodic);
  std::int64_t total = 0;
  for (int m = -4; m <= 4; ++m) total += static_cast<std::int64_t>(h.sector(m).states.size());
  CHECK(total == 81);
  const Eigen::MatrixXd dense(h.full_matrix());
  const oracle::Mat szt = [] {
    oracle::Mat s = oracle::Mat::Zero(81, 81);
    for (int i = 0; i < 4; ++i) s += oracle::site_op(oracle::sz(), i, 4);
    return s;
  }();
  const oracle::Mat hc = dense.cast<oracle::cplx>();
  CHECK((hc * szt - szt * hc).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Hamiltonian commutes with total spin at U=0") {
  const int n = 4;
  oracle::Mat s2 = oracle::Mat::Zero(81, 81);
  for (const auto& s : {oracle::sx(), oracle::sy(), oracle::sz()}) {
    oracle::Mat tot = oracle::Mat::Zero(81, 81);
    for (int i = 0; i < n; ++i) tot += oracle::site_op(s, i, n);
    s2 += tot * tot;
  }
  const oracle::Mat h = Eigen::MatrixXd(build_hamiltonian(n, 0.0, Boundary::periodic).full_matrix()).cast<oracle::cplx>();
  CHECK((h * s2 - s2 * h).cwiseAbs().maxCoeff() < 1e-11);
  // the local Casimir is 2 on every site
  const oracle::Mat c = oracle::sx() * oracle::sx() + oracle::sy() * oracle::sy() + oracle::sz() * oracle::sz();
  CHECK((c - 2.0 * oracle::Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("ground state energies match dense diagonalization") {
  for (int L : {3, 4, 5}) {
    for (double u : {-1.5, 0.0, 0.9}) {
      for (bool periodic : {false, true}) {
        const auto gs = ground_state(build_hamiltonian(L, u, periodic ? Boundary::periodic : Boundary::open));
        CHECK(gs.energy == doctest::Approx(dense_spectrum(L, u, periodic)(0)).epsilon(1e-10));
        CHECK(gs.state.amplitudes().norm() == doctest::Approx(1.0));
      }
    }
  }
}

TEST_CASE("low spectrum matches dense diagonalization") {
  const auto ref = dense_spectrum(5, -0.5, true);
  const auto slice = low_spectrum(build_hamiltonian(5, -0.5, Boundary::periodic), 4);
  REQUIRE(slice.energies.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(slice.energies[k] == doctest::Approx(ref(k)).epsilon(1e-9));
  const auto one = low_spectrum(build_hamiltonian(5, -0.5, Boundary::periodic), 1);
  CHECK(one.energies[0] == doctest::Approx(ground_state(build_hamiltonian(5, -0.5, Boundary::periodic)).energy));
}

TEST_CASE("large U ground state approaches the all-zero configuration") {
  const auto gs = ground_state(build_hamiltonian(4, 10.0, Boundary::periodic));
  const std::int64_t zero = 1 * 27 + 1 * 9 + 1 * 3 + 1;
  const double overlap = std::norm(gs.state.amplitudes()(zero));
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(oracle::hamiltonian(4, 10.0, true));
  CHECK(overlap == doctest::Approx(std::norm(es.eigenvectors()(zero, 0))).epsilon(1e-9));
  // second order: each bond mixes in |+1,-1> and |-1,+1> with amplitude 1/(2U-1)
  CHECK(overlap == doctest::Approx(1.0 - 8.0 / (19.0 * 19.0)).epsilon(5e-3));
}

TEST_CASE("ground state is an eigenvector") {
  const auto h = build_hamiltonian(8, 0.3, Boundary::open);
  const auto gs = ground_state(h);
  const Eigen::VectorXd re = gs.state.amplitudes().real();
  const Eigen::VectorXd hv = h.full_matrix() * re;
  CHECK((hv - gs.energy * re).norm() < 1e-7);
}

TEST_CASE("caps") {
  CHECK_THROWS_AS(build_hamiltonian(kMaxSparseLength + 1, 0.0, Boundary::open), CapError);
  CHECK_THROWS_AS(FullSpectrum(build_hamiltonian(kMaxDenseLength + 1, 0.0, Boundary::open)), CapError);
}

TEST_CASE("thermal state") {
  const auto h = build_hamiltonian(4, 0.5, Boundary::periodic);
  const FullSpectrum spec(h);
  const oracle::Mat dense = Eigen::MatrixXd(h.full_matrix()).cast<oracle::cplx>();

  SUBCASE("matches exp(-H/T) / Z") {
    const double t = 0.7;
    Eigen::SelfAdjointEigenSolver<oracle::Mat> es(dense);
    Eigen::VectorXd w = (-(es.eigenvalues().array() - es.eigenvalues()(0)) / t).exp();
    w /= w.sum();
    const oracle::Mat ref = es.eigenvectors() * w.cast<oracle::cplx>().asDiagonal() * es.eigenvectors().adjoint();
    const auto rho = thermal_state(spec, t);
    CHECK((rho.matrix() - ref).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((rho.matrix() * dense - dense * rho.matrix()).cwiseAbs().maxCoeff() < 1e-11);
  }
  SUBCASE("high temperature tends to the identity") {
    const auto rho = thermal_state(spec, 1e6);
    CHECK((rho.matrix() - oracle::Mat::Identity(81, 81) / 81.0).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("low temperature tends to the ground projector") {
    const auto gs = ground_state(h);
    REQUIRE_FALSE(gs.degenerate);
    const auto rho = thermal_state(spec, 1e-3);
    const oracle::Mat p = gs.state.amplitudes() * gs.state.amplitudes().adjoint();
    CHECK((rho.matrix() - p).cwiseAbs().maxCoeff() < 1e-8);
  }
  CHECK_THROWS(thermal_state(spec, 0.0));
}

TEST_CASE("reduced pair states") {
  const auto gs = ground_state(build_hamiltonian(5, -0.2, Boundary::open));
  const oracle::Mat full = gs.state.amplitudes() * gs.state.amplitudes().adjoint();
  for (auto [i, j] : {std::pair{0, 1}, std::pair{1, 3}, std::pair{2, 4}}) {
    const auto red = reduced_pair_state(gs.state, i, j);
    CHECK((red.matrix() - oracle::reduce_pair(full, 5, i, j)).cwiseAbs().maxCoeff() < 1e-12);
    const auto red2 = reduced_pair_state(DensityMatrix::from_pure(gs.state), i, j);
    CHECK((red2.matrix() - red.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
}
