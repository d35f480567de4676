#include "s1d/discord.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>

#include "s1d/model.hpp"
#include "s1d/optimizer.hpp"

namespace s1d {

namespace {

using Eigen::VectorXd;
using Matrix9c = Eigen::Matrix<cplx, 9, 9>;

constexpr double kPi = std::numbers::pi;
constexpr double kZeroProbability = 1e-12;
constexpr double kDistinctBasis = 1e-3;

using BasisObjective = std::function<double(std::span<const ProjectiveBasis>)>;

double entropy3(const Matrix3c& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix3c> es(rho, Eigen::EigenvaluesOnly);
  return spectrum_entropy(es.eigenvalues());
}

double shannon3(const Eigen::Vector3d& p) { return spectrum_entropy(RVector(p)); }

void require_two_sites(const DensityMatrix& rho) {
  if (rho.site_count() != 2) {
    throw DimensionError("two-site state required, got " + std::to_string(rho.site_count()) +
                         " sites");
  }
}

Matrix3c site_state(const DensityMatrix& rho, int site) {
  const int keep[1] = {site};
  return partial_trace(rho, keep).matrix();
}

// ---------------------------------------------------------------------------
// Parameter layouts: one angle group per measured site, or a single shared
// group. Within a group the order is theta, alpha, beta, gamma, psi, phi, phi0.

struct Layout {
  int sites;
  bool shared;
  AngleMode mode;

  int groups() const { return shared ? 1 : sites; }
  int per_group() const { return mode == AngleMode::full ? 7 : 3; }
  Eigen::Index size() const { return groups() * per_group(); }

  std::vector<MeasurementAngles> decode(const VectorXd& x) const {
    std::vector<MeasurementAngles> out(groups());
    for (int g = 0; g < groups(); ++g) {
      const double* p = x.data() + g * per_group();
      auto& a = out[g];
      a.theta = p[0];
      a.alpha = p[1];
      a.beta = p[2];
      if (mode == AngleMode::full) {
        a.gamma = p[3];
        a.psi = p[4];
        a.phi = p[5];
        a.phi0 = p[6];
      }
    }
    return out;
  }

  VectorXd encode(const std::vector<MeasurementAngles>& angles) const {
    VectorXd x(size());
    for (int g = 0; g < groups(); ++g) {
      const auto& a = angles[angles.size() == 1 ? 0 : g];
      double* p = x.data() + g * per_group();
      p[0] = a.theta;
      p[1] = a.alpha;
      p[2] = a.beta;
      if (mode == AngleMode::full) {
        p[3] = a.gamma;
        p[4] = a.psi;
        p[5] = a.phi;
        p[6] = a.phi0;
      }
    }
    return x;
  }
};

std::vector<ProjectiveBasis> bases_for(const std::vector<MeasurementAngles>& groups, int sites) {
  std::vector<ProjectiveBasis> out;
  out.reserve(sites);
  for (int s = 0; s < sites; ++s) {
    out.push_back(basis_from_angles(groups.size() == 1 ? groups[0] : groups[s]));
  }
  return out;
}

struct Candidate {
  double value;
  std::vector<MeasurementAngles> angles;  // per group
};

double circular_size(double x) {
  const double w = std::fmod(std::abs(x), 2.0 * kPi);
  return std::min(w, 2.0 * kPi - w);
}

/// Complexity of an angle assignment: squeezing and complex-phase angles
/// count, the rotation theta does not.
double complexity(const std::vector<MeasurementAngles>& angles) {
  double c = 0.0;
  for (const auto& a : angles) {
    c += circular_size(a.alpha) + circular_size(a.beta) + circular_size(a.gamma) +
         circular_size(a.psi) + circular_size(a.phi) + circular_size(a.phi0);
  }
  return c;
}

constexpr double kSnapUnit = kPi / 24.0;
constexpr double kSnapRadius = 1e-2;

double snap(double x) {
  const double r = kSnapUnit * std::round(x / kSnapUnit);
  return std::abs(x - r) <= kSnapRadius ? r : x;
}

int round_count(const std::vector<MeasurementAngles>& angles) {
  int n = 0;
  for (const auto& a : angles) {
    for (double x : a.ordered()) n += std::abs(x - kSnapUnit * std::round(x / kSnapUnit)) < 1e-12 ? 1 : 0;
  }
  return n;
}

/// Every angle moved to the nearest multiple of pi/24 when that is close.
std::vector<MeasurementAngles> snapped(const std::vector<MeasurementAngles>& angles) {
  std::vector<MeasurementAngles> out;
  for (const auto& a : angles) {
    MeasurementAngles s;
    s.theta = snap(a.theta);
    s.alpha = snap(a.alpha);
    s.beta = snap(a.beta);
    s.gamma = snap(a.gamma);
    s.psi = snap(a.psi);
    s.phi = snap(a.phi);
    s.phi0 = snap(a.phi0);
    out.push_back(s.wrapped());
  }
  return out;
}

bool simpler(const std::vector<MeasurementAngles>& a, const std::vector<MeasurementAngles>& b) {
  const double ca = complexity(a), cb = complexity(b);
  if (std::abs(ca - cb) > 1e-6) return ca < cb;
  const int ra = round_count(a), rb = round_count(b);
  if (ra != rb) return ra > rb;
  for (std::size_t g = 0; g < a.size(); ++g) {
    const auto oa = a[g].ordered(), ob = b[g].ordered();
    for (std::size_t k = 0; k < oa.size(); ++k) {
      if (std::abs(oa[k] - ob[k]) > 1e-9) return oa[k] < ob[k];
    }
  }
  return false;
}

/// Replaces each group by (theta, 0, 0) when its projector set allows it,
/// otherwise wraps the angles into [0, 2 pi).
std::vector<MeasurementAngles> canonicalize(const std::vector<MeasurementAngles>& angles) {
  std::vector<MeasurementAngles> out;
  for (const auto& a : angles) {
    if (auto theta = fit_rotation_only(basis_from_angles(a), kDistinctBasis)) {
      out.push_back(MeasurementAngles::real(*theta, 0.0, 0.0));
    } else {
      out.push_back(a.wrapped());
    }
  }
  return out;
}

bool bases_differ(const std::vector<ProjectiveBasis>& a, const std::vector<ProjectiveBasis>& b) {
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (basis_distance(a[s], b[s]) > kDistinctBasis) return true;
  }
  return false;
}

DiscordResult minimize_over_bases(const BasisObjective& objective, int sites, bool shared,
                                  AngleMode mode, const OptimizerConfig& cfg) {
  cfg.validate();
  DiscordResult result;
  long evals = 0;
  auto eval_angles = [&](const std::vector<MeasurementAngles>& groups) {
    ++evals;
    const auto b = bases_for(groups, sites);
    return objective(b);
  };

  // 1. coarse grid, one real angle set on every site
  const int g = cfg.coarse_grid;
  struct GridPoint {
    double value;
    MeasurementAngles angles;
  };
  std::vector<GridPoint> grid;
  grid.reserve(static_cast<std::size_t>(g) * g * g);
  for (int it = 0; it < g; ++it) {
    for (int ia = 0; ia < g; ++ia) {
      for (int ib = 0; ib < g; ++ib) {
        const auto a = MeasurementAngles::real(kPi * it / (g - 1), 2.0 * kPi * ia / g,
                                               2.0 * kPi * ib / g);
        grid.push_back({eval_angles({a}), a});
      }
    }
  }
  std::stable_sort(grid.begin(), grid.end(),
                   [](const GridPoint& x, const GridPoint& y) { return x.value < y.value; });
  result.coarse_value = grid.front().value;

  // 2. Nelder-Mead refinement, real angles first
  NelderMeadOptions nm;
  nm.ftol = cfg.refine_tolerance;
  nm.max_evals = cfg.max_refine_iters;
  bool all_converged = true;
  std::vector<Candidate> real_found, full_found;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> jitter(1.0, 1.1);

  const Layout real_layout{sites, shared, AngleMode::real};
  const int starts = std::min<int>(cfg.restarts, static_cast<int>(grid.size()));
  for (int k = 0; k < starts; ++k) {
    const VectorXd x0 = real_layout.encode({grid[k].angles});
    VectorXd steps(x0.size());
    for (Eigen::Index i = 0; i < steps.size(); ++i) {
      const double base = (i % 3 == 0) ? 0.5 * kPi / (g - 1) : kPi / g;
      steps(i) = base * jitter(rng);
    }
    auto f = [&](const VectorXd& x) { return eval_angles(real_layout.decode(x)); };
    const auto r = nelder_mead(f, x0, steps, nm);
    all_converged = all_converged && r.converged;
    real_found.push_back({r.value, real_layout.decode(r.x)});
  }

  if (mode == AngleMode::full) {
    const Layout full_layout{sites, shared, AngleMode::full};
    for (const auto& c : real_found) {
      const VectorXd x0 = full_layout.encode(c.angles);
      VectorXd steps(x0.size());
      for (Eigen::Index i = 0; i < steps.size(); ++i) {
        const double base = (i % 7 < 3) ? 0.5 * kPi / (g - 1) : 0.25 * kPi;
        steps(i) = base * jitter(rng);
      }
      auto f = [&](const VectorXd& x) { return eval_angles(full_layout.decode(x)); };
      const auto r = nelder_mead(f, x0, steps, nm);
      all_converged = all_converged && r.converged;
      full_found.push_back({r.value, full_layout.decode(r.x)});
    }
  }

  // 3. pick the simplest representative among near-minimal candidates
  std::vector<Candidate> all = real_found;
  all.insert(all.end(), full_found.begin(), full_found.end());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : all) best = std::min(best, c.value);
  const double accept = best + 10.0 * cfg.refine_tolerance;

  std::vector<Candidate> near;
  for (const auto& c : all) {
    if (c.value > best + cfg.refine_tolerance) continue;
    near.push_back(c);
    auto canon = canonicalize(c.angles);
    for (auto&& alt : {snapped(c.angles), snapped(canon), canon}) {
      const double v = eval_angles(alt);
      if (v <= accept) near.push_back({v, alt});
    }
  }
  std::size_t pick = 0;
  for (std::size_t i = 1; i < near.size(); ++i) {
    if (simpler(near[i].angles, near[pick].angles)) pick = i;
  }
  const Candidate& chosen = near[pick];

  // degenerate if distinct measurements reach the minimum
  const auto chosen_bases = bases_for(chosen.angles, sites);
  bool degenerate = false;
  for (const auto& c : near) {
    if (bases_differ(bases_for(c.angles, sites), chosen_bases)) degenerate = true;
  }
  for (const auto& p : grid) {
    if (degenerate || p.value > best + cfg.refine_tolerance) break;
    if (bases_differ(bases_for({p.angles}, sites), chosen_bases)) degenerate = true;
  }

  result.value = std::min(best, chosen.value);
  result.angles.clear();
  for (int s = 0; s < (shared ? 1 : sites); ++s) {
    result.angles.push_back(chosen.angles[chosen.angles.size() == 1 ? 0 : s].wrapped());
  }
  result.optimizer_evals = evals;
  result.converged = all_converged;
  result.degenerate_minimum = degenerate;
  return result;
}

DiscordResult minimum_over_candidates(const BasisObjective& objective, int sites,
                                      std::span<const MeasurementAngles> candidates) {
  if (candidates.empty()) throw std::invalid_argument("no candidate angle sets given");
  DiscordResult r;
  double best = std::numeric_limits<double>::infinity();
  std::size_t pick = 0;
  std::vector<double> values;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto b = bases_for({candidates[i]}, sites);
    values.push_back(objective(b));
    if (values.back() < best) {
      best = values.back();
      pick = i;
    }
  }
  const auto chosen = bases_for({candidates[pick]}, sites);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i != pick && values[i] <= best + 1e-8 &&
        bases_differ(bases_for({candidates[i]}, sites), chosen)) {
      r.degenerate_minimum = true;
    }
  }
  r.value = best;
  r.coarse_value = best;
  r.angles = {candidates[pick].wrapped()};
  r.optimizer_evals = static_cast<long>(candidates.size());
  return r;
}

// ---------------------------------------------------------------------------
// objective contexts

struct PairContext {
  Matrix9c rho;
  double s_ab;
  Matrix3c rho_a, rho_b;
  double s_a, s_b;

  explicit PairContext(const DensityMatrix& r) {
    require_two_sites(r);
    rho = r.matrix();
    s_ab = von_neumann_entropy(r);
    rho_a = site_state(r, 0);
    rho_b = site_state(r, 1);
    s_a = entropy3(rho_a);
    s_b = entropy3(rho_b);
  }

  Eigen::Matrix<double, 9, 1> joint_probabilities(const ProjectiveBasis& a,
                                                  const ProjectiveBasis& b) const {
    Matrix9c w;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) w.block<3, 3>(3 * i, 3 * j) = a.vectors()(i, j) * b.vectors();
    }
    const Matrix9c rw = rho * w;
    return w.conjugate().cwiseProduct(rw).colwise().sum().real().transpose();
  }

  double symmetric(const ProjectiveBasis& a, const ProjectiveBasis& b) const {
    const RVector p = joint_probabilities(a, b);
    const double global = shannon_entropy(p.cwiseMax(0.0)) - s_ab;
    const double local_a = shannon3(local_probabilities(rho_a, a).cwiseMax(0.0)) - s_a;
    const double local_b = shannon3(local_probabilities(rho_b, b).cwiseMax(0.0)) - s_b;
    return global - local_a - local_b;
  }

  /// sum_j p_j S(rho_A|j) for a measurement of B.
  double conditional_entropy(const ProjectiveBasis& b) const {
    double acc = 0.0;
    for (int j = 0; j < 3; ++j) {
      const Eigen::Vector3cd u = b.vector(j);
      Matrix3c cond = Matrix3c::Zero();
      for (int a = 0; a < 3; ++a) {
        for (int a2 = 0; a2 < 3; ++a2) {
          cplx s = 0.0;
          for (int x = 0; x < 3; ++x) {
            for (int y = 0; y < 3; ++y) s += std::conj(u(x)) * rho(3 * a + x, 3 * a2 + y) * u(y);
          }
          cond(a, a2) = s;
        }
      }
      const double p = cond.trace().real();
      if (p < kZeroProbability) continue;
      cond /= p;
      cond = 0.5 * (cond + cond.adjoint()).eval();
      acc += p * entropy3(cond);
    }
    return acc;
  }
};

struct GlobalContext {
  int sites;
  double s_total;
  std::vector<Matrix3c> local;
  std::vector<double> s_local;

  void finish() {
    for (const auto& r : local) s_local.push_back(entropy3(r));
  }

  double value(const RVector& joint, std::span<const ProjectiveBasis> bases) const {
    double v = shannon_entropy(joint.cwiseMax(0.0)) - s_total;
    for (int s = 0; s < sites; ++s) {
      v -= shannon3(local_probabilities(local[s], bases[s]).cwiseMax(0.0)) - s_local[s];
    }
    return v;
  }
};

GlobalContext make_context(const DensityMatrix& rho) {
  GlobalContext c{rho.site_count(), von_neumann_entropy(rho), {}, {}};
  for (int s = 0; s < c.sites; ++s) c.local.push_back(site_state(rho, s));
  c.finish();
  return c;
}

GlobalContext make_context(const StateVector& psi) {
  GlobalContext c{psi.site_count(), 0.0, single_site_states(psi), {}};
  c.finish();
  return c;
}

void check_global_cap(int sites) {
  if (sites > kMaxGlobalLength) {
    throw CapError("global discord is limited to L <= " + std::to_string(kMaxGlobalLength));
  }
  if (sites < 2) throw DimensionError("global discord needs at least two sites");
}

void check_bases(std::size_t count, int sites) {
  if (static_cast<int>(count) != sites) throw DimensionError("need one basis per site");
}

}  // namespace

std::string to_string(AngleMode m) { return m == AngleMode::full ? "full" : "real"; }

AngleMode angle_mode_from_string(const std::string& s) {
  if (s == "full") return AngleMode::full;
  if (s == "real") return AngleMode::real;
  throw std::invalid_argument("unknown angle mode '" + s + "'");
}

void OptimizerConfig::validate() const {
  if (coarse_grid < 2) throw std::invalid_argument("coarse_grid must be at least 2");
  if (!(refine_tolerance > 0.0)) throw std::invalid_argument("refine_tolerance must be positive");
  if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (max_refine_iters < 1) throw std::invalid_argument("max_refine_iters must be positive");
}

double mutual_information(const DensityMatrix& rho_ab) {
  const PairContext c(rho_ab);
  return c.s_a + c.s_b - c.s_ab;
}

double one_way_classical(const DensityMatrix& rho_ab, const ProjectiveBasis& basis_b) {
  const PairContext c(rho_ab);
  return c.s_a - c.conditional_entropy(basis_b);
}

DiscordResult asymmetric_discord(const DensityMatrix& rho_ab, const OptimizerConfig& cfg) {
  const PairContext c(rho_ab);
  const double base = c.s_b - c.s_ab;  // I - S(rho_A)
  auto objective = [&c, base](std::span<const ProjectiveBasis> b) {
    return base + c.conditional_entropy(b[0]);
  };
  return minimize_over_bases(objective, 1, false, AngleMode::full, cfg);
}

double symmetric_objective(const DensityMatrix& rho_ab, const ProjectiveBasis& a,
                           const ProjectiveBasis& b) {
  return PairContext(rho_ab).symmetric(a, b);
}

DiscordResult symmetric_discord(const DensityMatrix& rho_ab, AngleMode mode,
                                const OptimizerConfig& cfg) {
  const PairContext c(rho_ab);
  auto objective = [&c](std::span<const ProjectiveBasis> b) { return c.symmetric(b[0], b[1]); };
  return minimize_over_bases(objective, 2, false, mode, cfg);
}

DiscordResult symmetric_discord_at(const DensityMatrix& rho_ab,
                                   std::span<const MeasurementAngles> candidates) {
  const PairContext c(rho_ab);
  auto objective = [&c](std::span<const ProjectiveBasis> b) { return c.symmetric(b[0], b[1]); };
  return minimum_over_candidates(objective, 2, candidates);
}

double global_objective(const DensityMatrix& rho, std::span<const ProjectiveBasis> bases) {
  check_bases(bases.size(), rho.site_count());
  return make_context(rho).value(dephased_probabilities(rho, bases), bases);
}

double global_objective(const StateVector& psi, std::span<const ProjectiveBasis> bases) {
  check_bases(bases.size(), psi.site_count());
  return make_context(psi).value(dephased_probabilities(psi, bases), bases);
}

DiscordResult global_discord(const DensityMatrix& rho, bool shared, const OptimizerConfig& cfg) {
  check_global_cap(rho.site_count());
  const auto c = make_context(rho);
  auto objective = [&](std::span<const ProjectiveBasis> b) {
    return c.value(dephased_probabilities(rho, b), b);
  };
  return minimize_over_bases(objective, rho.site_count(), shared, AngleMode::real, cfg);
}

DiscordResult global_discord(const StateVector& psi, bool shared, const OptimizerConfig& cfg) {
  check_global_cap(psi.site_count());
  const auto c = make_context(psi);
  auto objective = [&](std::span<const ProjectiveBasis> b) {
    return c.value(dephased_probabilities(psi, b), b);
  };
  return minimize_over_bases(objective, psi.site_count(), shared, AngleMode::real, cfg);
}

DiscordResult global_discord_at(const DensityMatrix& rho,
                                std::span<const MeasurementAngles> candidates) {
  check_global_cap(rho.site_count());
  const auto c = make_context(rho);
  auto objective = [&](std::span<const ProjectiveBasis> b) {
    return c.value(dephased_probabilities(rho, b), b);
  };
  return minimum_over_candidates(objective, rho.site_count(), candidates);
}

DiscordResult global_discord_at(const StateVector& psi,
                                std::span<const MeasurementAngles> candidates) {
  check_global_cap(psi.site_count());
  const auto c = make_context(psi);
  auto objective = [&](std::span<const ProjectiveBasis> b) {
    return c.value(dephased_probabilities(psi, b), b);
  };
  return minimum_over_candidates(objective, psi.site_count(), candidates);
}

}  // namespace s1d
