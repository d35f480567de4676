// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails. Pass criterion numbers as arguments
// to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "s1d/csv.hpp"
#include "s1d/discord.hpp"
#include "s1d/measure.hpp"
#include "s1d/model.hpp"
#include "s1d/optimizer.hpp"
#include "s1d/qalgebra.hpp"
#include "s1d/run_config.hpp"
#include "s1d/scaling.hpp"
#include "s1d/sweep.hpp"

namespace fs = std::filesystem;
using namespace s1d;

namespace {

constexpr double kPi = std::numbers::pi;

// Criterion 1
constexpr double kCrossing1 = -1.6, kCrossing2 = 0.9, kCrossingTol = 0.05;
// Criterion 2
constexpr double kAngleTol = 1e-3, kCuspTol = 1e-6;
// Criterion 3
constexpr double kCollapseTol = 0.01;
// Criterion 4
constexpr double kPeakLo = -0.40, kPeakHi = -0.20, kUcLo = -0.36, kUcHi = -0.27;
// Criterion 5
constexpr double kTrueUc = 0.9667, kTrueNu = 1.6, kUstarTol = 0.002, kNuTol = 0.08;
// Criterion 6
constexpr double kThermalRise = 1e-3;
// Criterion 8
constexpr int kRandomStates = 200;
constexpr double kIdentityTol = 1e-10, kIdempotenceTol = 1e-12, kBasisTol = 1e-12,
                 kDiscordFloor = -1e-9, kOrderingSlack = 1e-9;
// Criterion 9
constexpr double kSharedTol = 1e-6;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("s1d_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunConfig sweep_config(Command cmd) {
  RunConfig cfg;
  cfg.command = cmd;
  cfg.workers = 1;
  return cfg;
}

double circular_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 2.0 * kPi);
  return std::min(d, 2.0 * kPi - d);
}

// ---------------------------------------------------------------------------

// Ground-level crossings: grid points where the lowest level switches branch.
// A crossing shows up as a V-shaped minimum of the gap from E0 to the next
// distinct level; its position is where straight lines through E0 on either
// side meet.
Outcome criterion1() {
  auto cfg = sweep_config(Command::spectrum);
  cfg.lengths = {5};
  cfg.boundary = Boundary::periodic;
  cfg.levels = 3;
  cfg.u_values = parse_grid("-2:1.5:0.01", "U");
  cfg.out = (scratch_dir() / "spectrum_L5.csv").string();
  run_sweep(cfg);

  const auto rows = read_csv(cfg.out);
  std::vector<double> us, e0, gap;
  for (std::size_t k = 0; k + 2 < rows.size(); k += 3) {
    us.push_back(rows[k].U);
    e0.push_back(rows[k].value);
    double next = std::numeric_limits<double>::infinity();
    for (int n = 1; n < 3; ++n) {
      if (rows[k + n].value - rows[k].value > 1e-9) {
        next = rows[k + n].value - rows[k].value;
        break;
      }
    }
    gap.push_back(next);
  }
  const double h = us[1] - us[0];
  std::vector<double> crossings;
  for (std::size_t k = 2; k + 2 < us.size(); ++k) {
    if (!(gap[k] <= gap[k - 1] && gap[k] <= gap[k + 1])) continue;
    // a branch switch: the gap is within one grid step of slope change
    const double sl = (e0[k - 1] - e0[k - 2]) / h, sr = (e0[k + 2] - e0[k + 1]) / h;
    if (std::abs(sl - sr) < 1e-3 || gap[k] > std::abs(sl - sr) * h) continue;
    const double bl = e0[k - 1] - sl * us[k - 1], br = e0[k + 1] - sr * us[k + 1];
    crossings.push_back((br - bl) / (sl - sr));
  }

  Outcome o;
  std::ostringstream d;
  d << "crossings found:";
  for (double c : crossings) d << ' ' << fmt("%.4f", c);
  o.pass = crossings.size() == 2 && std::abs(crossings[0] - kCrossing1) <= kCrossingTol &&
           std::abs(crossings[1] - kCrossing2) <= kCrossingTol;
  d << " (expected " << kCrossing1 << " and " << kCrossing2 << " within " << kCrossingTol << ")";
  o.detail = d.str();
  return o;
}

Outcome criterion2() {
  Outcome o;
  std::ostringstream d;
  const int L = 8;
  for (double U : {-1.0, -0.5, 0.5, 1.0}) {
    const auto gs = ground_state(build_hamiltonian(L, U, Boundary::open));
    const auto rho = reduced_pair_state(gs.state, L / 2 - 1, L / 2);
    const auto r = symmetric_discord(rho, AngleMode::full);
    const double theta = U < 0 ? 0.0 : kPi / 2;
    double worst = 0.0;
    for (const auto& a : r.angles) {
      worst = std::max({worst, circular_distance(a.theta, theta), circular_distance(a.alpha, 0.0),
                        circular_distance(a.beta, 0.0)});
    }
    o.pass = o.pass && worst <= kAngleTol;
    d << "U=" << U << " angle error " << fmt("%.2e", worst) << "; ";
  }
  const auto gs = ground_state(build_hamiltonian(L, 0.0, Boundary::open));
  const auto rho = reduced_pair_state(gs.state, L / 2 - 1, L / 2);
  const MeasurementAngles z = MeasurementAngles::real(0, 0, 0), x = MeasurementAngles::real(kPi / 2, 0, 0);
  const double dz = symmetric_discord_at(rho, std::vector{z}).value;
  const double dx = symmetric_discord_at(rho, std::vector{x}).value;
  o.pass = o.pass && std::abs(dz - dx) <= kCuspTol;
  d << "U=0 |D(z)-D(x)|=" << fmt("%.2e", std::abs(dz - dx));
  o.detail = d.str();
  return o;
}

Outcome criterion3() {
  Outcome o;
  std::ostringstream d;
  for (double U : {-1.0, -0.8, 1.8, 2.0}) {
    double v[2];
    int n = 0;
    for (int L : {8, 12}) {
      const auto gs = ground_state(build_hamiltonian(L, U, Boundary::open));
      v[n++] = symmetric_discord(reduced_pair_state(gs.state, L / 2 - 1, L / 2), AngleMode::full).value;
    }
    const double diff = std::abs(v[0] - v[1]);
    o.pass = o.pass && diff < kCollapseTol;
    d << "U=" << U << " |dD|=" << fmt("%.4f", diff) << "; ";
  }
  o.detail = d.str();
  return o;
}

Outcome criterion4() {
  std::vector<std::string> files;
  for (int L : {8, 10, 12, 14}) {
    auto cfg = sweep_config(Command::sweep);
    cfg.lengths = {L};
    cfg.boundary = Boundary::open;
    cfg.kind = DiscordKind::symmetric;
    cfg.mode = AngleMode::real;
    cfg.u_values = parse_grid("-0.6:-0.01:0.01", "U");
    cfg.out = (scratch_dir() / ("peak_L" + std::to_string(L) + ".csv")).string();
    run_sweep(cfg);
    files.push_back(cfg.out);
  }
  auto scfg = sweep_config(Command::scaling);
  scfg.inputs = files;
  // no crossing or collapse is expected on this side; only the peaks matter
  scfg.cross_window = {-0.6, -0.01};
  const auto report = run_scaling(scfg);

  Outcome o;
  std::ostringstream d;
  std::vector<std::pair<double, double>> inv_peak;
  for (const auto& p : report["peaks"]) {
    const double u = p["u_peak"].get<double>();
    const bool edge = p["at_edge"].get<bool>();
    inv_peak.emplace_back(1.0 / p["L"].get<int>(), u);
    o.pass = o.pass && !edge && u >= kPeakLo && u <= kPeakHi;
    d << "L=" << p["L"].get<int>() << " peak " << fmt("%.4f", u) << "; ";
  }
  std::sort(inv_peak.begin(), inv_peak.end());
  bool up = true, down = true;
  for (std::size_t k = 1; k < inv_peak.size(); ++k) {
    up = up && inv_peak[k].second >= inv_peak[k - 1].second;
    down = down && inv_peak[k].second <= inv_peak[k - 1].second;
  }
  o.pass = o.pass && (up || down);
  d << (up || down ? "monotone in 1/L; " : "not monotone in 1/L; ");
  if (report["extrapolation"].contains("u_c")) {
    const double uc = report["extrapolation"]["u_c"].get<double>();
    o.pass = o.pass && uc >= kUcLo && uc <= kUcHi;
    d << "u_c=" << fmt("%.4f", uc) << "; ";
  } else {
    o.pass = false;
    d << "no extrapolation; ";
  }
  const bool warned = !report["warnings"].empty();
  o.pass = o.pass && warned;
  d << (warned ? "small-size warning present" : "small-size warning missing");
  o.detail = d.str();
  return o;
}

// Synthetic family with d2D/dU2 = f((U - uc) L^{1/nu}) exactly:
// D = L^{-2/nu} F(x), F'' = f.
Outcome criterion5() {
  auto f_int2 = [](double x) {
    // f(x) = -0.5 + 0.8 x - 0.3 x^2 + 0.05 x^3
    return -0.25 * x * x + 0.8 / 6.0 * std::pow(x, 3) - 0.3 / 12.0 * std::pow(x, 4) +
           0.05 / 20.0 * std::pow(x, 5);
  };
  std::vector<std::string> files;
  const auto us = parse_grid("0.90:1.04:0.001", "U");
  for (int L : {32, 64, 128, 256}) {
    const auto path = scratch_dir() / ("synthetic_L" + std::to_string(L) + ".csv");
    std::ofstream out(path);
    out << kCsvHeader << '\n';
    const double s = std::pow(static_cast<double>(L), 1.0 / kTrueNu);
    for (double U : us) {
      ResultRecord r;
      r.L = L;
      r.boundary = "open";
      r.U = U;
      r.pair_i = L / 2 - 1;
      r.pair_j = L / 2;
      r.kind = "sym";
      r.mode = "full";
      r.value = f_int2((U - kTrueUc) * s) / (s * s);
      out << format_record(r) << '\n';
    }
    files.push_back(path.string());
  }
  auto cfg = sweep_config(Command::scaling);
  cfg.inputs = files;
  cfg.nu_range = {0.8, 3.0};
  const auto report = run_scaling(cfg);

  Outcome o;
  std::ostringstream d;
  if (!report["crossing"].contains("u_star") || !report["collapse"].contains("nu")) {
    o.pass = false;
    o.detail = "pipeline failed: " + report.dump();
    return o;
  }
  const double ustar = report["crossing"]["u_star"].get<double>();
  const double nu = report["collapse"]["nu"].get<double>();
  o.pass = std::abs(ustar - kTrueUc) <= kUstarTol && std::abs(nu - kTrueNu) <= kNuTol;
  d << "u_star=" << fmt("%.5f", ustar) << " nu=" << fmt("%.4f", nu) << " (nu_err "
    << fmt("%.3f", report["collapse"]["nu_err"].get<double>()) << ")";
  o.detail = d.str();
  return o;
}

Outcome criterion6() {
  auto cfg = sweep_config(Command::thermal);
  cfg.lengths = {6};
  cfg.boundary = Boundary::periodic;
  cfg.u_values = {2.0};
  cfg.t_values = parse_grid("0.01:1:0.01", "T");
  cfg.pairs = parse_pairs("offset:2,offset:1");
  cfg.kind = DiscordKind::symmetric;
  cfg.mode = AngleMode::full;
  cfg.out = (scratch_dir() / "thermal_L6.csv").string();
  run_sweep(cfg);

  const auto rows = read_csv(cfg.out);
  auto rise = [&rows](int offset) {
    double base = 0.0, top = -1.0;
    for (const auto& r : rows) {
      if (*r.pair_j - *r.pair_i != offset) continue;
      if (std::abs(*r.T - 0.01) < 1e-12) base = r.value;
      top = std::max(top, r.value);
    }
    return top - base;
  };
  const double nnn = rise(2), nn = rise(1);
  Outcome o;
  o.pass = nnn >= kThermalRise && nn < kThermalRise;
  o.detail = "next-nearest rise " + fmt("%.4e", nnn) + ", nearest rise " + fmt("%.4e", nn);
  return o;
}

Outcome criterion7() {
  std::vector<double> v;
  std::ostringstream d;
  for (int L : {2, 4, 6}) {
    const Boundary b = L == 2 ? Boundary::open : Boundary::periodic;
    const auto gs = ground_state(build_hamiltonian(L, 0.0, b));
    v.push_back(global_discord(gs.state, true).value);
    d << "L=" << L << " D_N=" << fmt("%.5f", v.back()) << "; ";
  }
  Outcome o;
  o.pass = v[0] < v[1] && v[1] < v[2];
  o.detail = d.str();
  return o;
}

CMatrix random_density(std::mt19937_64& rng, int rank) {
  std::normal_distribution<double> g;
  CMatrix a(9, rank);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = {g(rng), g(rng)};
  }
  CMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

MeasurementAngles random_angles(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  MeasurementAngles a;
  a.theta = u(rng);
  a.phi = u(rng);
  a.psi = u(rng);
  a.alpha = u(rng);
  a.beta = u(rng);
  a.gamma = u(rng);
  a.phi0 = u(rng);
  return a;
}

Outcome criterion8() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> rank_dist(1, 9);
  double worst_identity = 0.0, worst_idem = 0.0, worst_basis = 0.0, min_discord = 1.0;
  int ordering_failures = 0;
  for (int n = 0; n < kRandomStates; ++n) {
    const DensityMatrix rho(random_density(rng, rank_dist(rng)));
    const ProjectiveBasis a = basis_from_angles(random_angles(rng));
    const ProjectiveBasis b = basis_from_angles(random_angles(rng));
    for (const auto* basis : {&a, &b}) {
      const Matrix3c gram = basis->vectors().adjoint() * basis->vectors();
      Matrix3c sum = Matrix3c::Zero();
      for (int k = 0; k < 3; ++k) sum += basis->projector(k);
      worst_basis = std::max({worst_basis, (gram - Matrix3c::Identity()).cwiseAbs().maxCoeff(),
                              (sum - Matrix3c::Identity()).cwiseAbs().maxCoeff()});
    }

    const double I = mutual_information(rho);
    const double J = one_way_classical(rho, b);
    if (!(I + kOrderingSlack >= J && J >= -kOrderingSlack)) ++ordering_failures;

    const std::vector<ProjectiveBasis> bases{a, b};
    const DensityMatrix pi = dephase(rho, bases);
    const double lhs = relative_entropy(rho, pi);
    const double rhs = von_neumann_entropy(pi) - von_neumann_entropy(rho);
    worst_identity = std::max(worst_identity, std::abs(lhs - rhs));
    const DensityMatrix pi2 = dephase(pi, bases);
    worst_idem = std::max(worst_idem, (pi2.matrix() - pi.matrix()).cwiseAbs().maxCoeff());

    OptimizerConfig quick;
    quick.coarse_grid = 5;
    quick.restarts = 2;
    min_discord = std::min({min_discord, symmetric_discord(rho, AngleMode::real, quick).value,
                            asymmetric_discord(rho, quick).value});
  }
  Outcome o;
  o.pass = ordering_failures == 0 && worst_identity <= kIdentityTol && worst_idem <= kIdempotenceTol &&
           worst_basis <= kBasisTol && min_discord >= kDiscordFloor;
  std::ostringstream d;
  d << "I>=J>=0 failures " << ordering_failures << "; identity " << fmt("%.1e", worst_identity)
    << "; idempotence " << fmt("%.1e", worst_idem) << "; basis " << fmt("%.1e", worst_basis)
    << "; min discord " << fmt("%.2e", min_discord);
  o.detail = d.str();
  return o;
}

// Shared angles against per-site angles. The per-site minimum is taken over
// the library optimizer and extra Nelder-Mead runs from random starts.
Outcome criterion9() {
  Outcome o;
  std::ostringstream d;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  for (double U : {-1.0, 0.5}) {
    const auto gs = ground_state(build_hamiltonian(4, U, Boundary::periodic));
    const double shared = global_discord(gs.state, true).value;
    double independent = global_discord(gs.state, false).value;
    auto objective = [&gs](const Eigen::VectorXd& x) {
      std::vector<ProjectiveBasis> bases;
      for (int s = 0; s < 4; ++s) bases.push_back(real_basis_from_angles(x(3 * s), x(3 * s + 1), x(3 * s + 2)));
      return global_objective(gs.state, bases);
    };
    for (int start = 0; start < 8; ++start) {
      Eigen::VectorXd x0(12);
      for (int i = 0; i < 12; ++i) x0(i) = u(rng);
      const auto r = nelder_mead(objective, x0, Eigen::VectorXd::Constant(12, 0.5), {});
      independent = std::min(independent, r.value);
    }
    o.pass = o.pass && std::abs(shared - independent) <= kSharedTol;
    d << "U=" << U << " shared " << fmt("%.8f", shared) << " per-site " << fmt("%.8f", independent) << "; ";
  }
  o.detail = d.str();
  return o;
}

Outcome criterion10() {
  std::string bytes[2];
  int n = 0;
  for (int workers : {1, 8}) {
    auto cfg = sweep_config(Command::sweep);
    cfg.lengths = {4, 6};
    cfg.boundary = Boundary::open;
    cfg.pairs = parse_pairs("central,offset:2");
    cfg.kind = DiscordKind::symmetric;
    cfg.mode = AngleMode::full;
    cfg.u_values = parse_grid("-1:1:0.1", "U");
    cfg.optimizer.seed = 42;
    cfg.workers = workers;
    cfg.out = (scratch_dir() / ("det_w" + std::to_string(workers) + ".csv")).string();
    run_sweep(cfg);
    std::ifstream in(cfg.out, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    bytes[n++] = ss.str();
  }
  Outcome o;
  o.pass = !bytes[0].empty() && bytes[0] == bytes[1];
  o.detail = std::to_string(bytes[0].size()) + " bytes, " + (o.pass ? "identical" : "different");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                        criterion5, criterion6, criterion7, criterion8,
                                                        criterion9, criterion10};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("ACCEPTANCE %d: %s  %s [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  fs::remove_all(scratch_dir());
  return failures == 0 ? 0 : 1;
}
