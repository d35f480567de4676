#pragma once

// Quantum discord measures for spin-1 subsystems, each minimized over local
// projective measurements.
//
// Optimizer protocol, shared by all measures:
//   1. coarse grid over the real angles (theta, alpha, beta), the same angle
//      set on every measured site;
//   2. Nelder-Mead from the `restarts` best grid points in the full parameter
//      space of the requested mode;
//   3. among minima within the tolerance, report the simplest representative
//      (real angles before complex ones, alpha = beta = 0 when attainable,
//      then lexicographic order).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "s1d/measure.hpp"
#include "s1d/qalgebra.hpp"

namespace s1d {

enum class AngleMode { full, real };

std::string to_string(AngleMode m);
AngleMode angle_mode_from_string(const std::string& s);

struct OptimizerConfig {
  int coarse_grid = 9;
  double refine_tolerance = 1e-8;
  int max_refine_iters = 20000;  // objective evaluations per start
  int restarts = 4;
  std::uint64_t seed = 1;

  void validate() const;
};

struct DiscordResult {
  double value = 0.0;
  std::vector<MeasurementAngles> angles;  // one per measured subsystem
  long optimizer_evals = 0;
  bool converged = true;
  bool degenerate_minimum = false;
  double coarse_value = 0.0;  // best coarse-grid objective
};

inline constexpr int kMaxGlobalLength = 8;

/// I = S(rho_A) + S(rho_B) - S(rho_AB) for a two-site state.
double mutual_information(const DensityMatrix& rho_ab);

/// J = S(rho_A) - sum_j p_j S(rho_A|j), measuring site B (the second site).
double one_way_classical(const DensityMatrix& rho_ab, const ProjectiveBasis& basis_b);

/// D^{B->A}: inf over measurements of B of I - J. Searches all seven angles.
DiscordResult asymmetric_discord(const DensityMatrix& rho_ab, const OptimizerConfig& cfg = {});

/// Symmetric discord objective at fixed bases, through the dephasing
/// identity S(rho || Pi rho) = S(Pi rho) - S(rho).
double symmetric_objective(const DensityMatrix& rho_ab, const ProjectiveBasis& a,
                           const ProjectiveBasis& b);

DiscordResult symmetric_discord(const DensityMatrix& rho_ab, AngleMode mode,
                                const OptimizerConfig& cfg = {});

/// Global discord objective at fixed per-site bases.
double global_objective(const DensityMatrix& rho, std::span<const ProjectiveBasis> bases);
double global_objective(const StateVector& psi, std::span<const ProjectiveBasis> bases);

/// Global discord over real bases. shared = true uses one angle set for
/// every site. Limited to 8 sites.
DiscordResult global_discord(const DensityMatrix& rho, bool shared, const OptimizerConfig& cfg = {});
DiscordResult global_discord(const StateVector& psi, bool shared, const OptimizerConfig& cfg = {});

/// Minimum of the global objective over a fixed list of angle sets, each
/// applied to every site.
DiscordResult global_discord_at(const DensityMatrix& rho, std::span<const MeasurementAngles> candidates);
DiscordResult global_discord_at(const StateVector& psi, std::span<const MeasurementAngles> candidates);

/// Same for the symmetric two-site objective.
DiscordResult symmetric_discord_at(const DensityMatrix& rho_ab,
                                   std::span<const MeasurementAngles> candidates);

}  // namespace s1d
