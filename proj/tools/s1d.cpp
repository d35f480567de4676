#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "s1d/lanczos.hpp"
#include "s1d/run_config.hpp"
#include "s1d/scaling.hpp"
#include "s1d/sweep.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kCap = 3, kNoConvergence = 4 };

// Raw flag values; only flags given on the command line override the config file.
struct Flags {
  std::string config, L, boundary, U, T, pair, kind, mode, out, peak_window, cross_window,
      collapse_window, nu_range;
  int grid_points = 0, restarts = 0, workers = 0, levels = 0, max_evals = 0, drop_below = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0, uc = 0.0;
  bool resume = false, timing = false, independent = false, full_opt = false;
  std::vector<std::string> inputs;
};

void add_run_flags(CLI::App* app, Flags& f, s1d::Command cmd) {
  app->add_option("--config", f.config, "JSON config file; flags override its fields");
  app->add_option("--out", f.out, "Output path");
  app->add_option("--workers", f.workers, "Worker threads (default from S1D_WORKERS, else 1)");
  if (cmd == s1d::Command::scaling) return;
  app->add_option("--L", f.L, "Chain length or comma list");
  app->add_option("--boundary", f.boundary, "open or periodic")->check(CLI::IsMember({"open", "periodic"}));
  app->add_option("--U", f.U, "Anisotropy grid min:max:step or comma list");
  app->add_flag("--resume", f.resume, "Continue an interrupted run in --out");
  app->add_flag("--timing", f.timing, "Fill the seconds column");
  if (cmd == s1d::Command::spectrum) {
    app->add_option("--k", f.levels, "Number of lowest levels");
    return;
  }
  if (cmd == s1d::Command::thermal) app->add_option("--T", f.T, "Temperature grid min:max:step or comma list");
  app->add_option("--pair", f.pair, "central, i:j or offset:k; comma list allowed");
  app->add_option("--kind", f.kind, "asym, sym or global")->check(CLI::IsMember({"asym", "sym", "global"}));
  app->add_option("--mode", f.mode, "full or real")->check(CLI::IsMember({"full", "real"}));
  app->add_option("--grid-points", f.grid_points, "Coarse grid points per angle");
  app->add_option("--restarts", f.restarts, "Refinement starts");
  app->add_option("--tolerance", f.tolerance, "Refinement tolerance");
  app->add_option("--max-evals", f.max_evals, "Objective evaluations per refinement start");
  app->add_option("--seed", f.seed, "Random seed");
  app->add_flag("--independent-angles", f.independent, "Global discord with separate angles per site");
  app->add_flag("--full-opt", f.full_opt, "Optimize global discord on chains longer than 6 instead of fixed angles");
}

void add_scaling_flags(CLI::App* app, Flags& f) {
  app->add_option("inputs", f.inputs, "Sweep CSV files")->required();
  app->add_option("--peak-window", f.peak_window, "U range searched for the first-derivative peak, lo:hi");
  app->add_option("--drop-below", f.drop_below, "Ignore sizes below this L in the extrapolation");
  app->add_option("--cross-window", f.cross_window, "U range of the quadratic crossing fits, lo:hi");
  app->add_option("--collapse-window", f.collapse_window, "U range used in the collapse, lo:hi");
  app->add_option("--nu-range", f.nu_range, "nu scan range, lo:hi");
  app->add_option("--uc", f.uc, "Critical coupling for the collapse (default: crossing)");
}

s1d::RunConfig build_config(const CLI::App* app, const Flags& f, s1d::Command cmd) {
  using namespace s1d;
  RunConfig cfg;
  cfg.workers = default_workers();
  if (app->count("--config")) load_config_file(cfg, f.config);
  cfg.command = cmd;

  auto given = [app](const char* name) {
    try {
      return app->count(name) > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };
  if (given("--out")) cfg.out = f.out;
  if (given("--workers")) cfg.workers = f.workers;
  if (given("--L")) {
    cfg.lengths.clear();
    for (double v : parse_grid(f.L, "L")) {
      if (v != static_cast<int>(v)) throw ConfigError("L", "lengths must be integers");
      cfg.lengths.push_back(static_cast<int>(v));
    }
  }
  if (given("--boundary")) cfg.boundary = boundary_from_string(f.boundary);
  if (given("--U")) cfg.u_values = parse_grid(f.U, "U");
  if (given("--T")) cfg.t_values = parse_grid(f.T, "T");
  if (given("--resume")) cfg.resume = f.resume;
  if (given("--timing")) cfg.timing = f.timing;
  if (given("--k")) cfg.levels = f.levels;
  if (given("--pair")) cfg.pairs = parse_pairs(f.pair);
  if (given("--kind")) cfg.kind = discord_kind_from_string(f.kind);
  if (given("--mode")) cfg.mode = angle_mode_from_string(f.mode);
  if (given("--grid-points")) cfg.optimizer.coarse_grid = f.grid_points;
  if (given("--restarts")) cfg.optimizer.restarts = f.restarts;
  if (given("--tolerance")) cfg.optimizer.refine_tolerance = f.tolerance;
  if (given("--max-evals")) cfg.optimizer.max_refine_iters = f.max_evals;
  if (given("--seed")) cfg.optimizer.seed = f.seed;
  if (given("--independent-angles")) cfg.independent_angles = f.independent;
  if (given("--full-opt")) cfg.full_opt = f.full_opt;
  if (given("inputs")) cfg.inputs = f.inputs;
  if (given("--peak-window")) cfg.peak_window = parse_range(f.peak_window, "peak_window");
  if (given("--drop-below")) cfg.drop_below = f.drop_below;
  if (given("--cross-window")) cfg.cross_window = parse_range(f.cross_window, "cross_window");
  if (given("--collapse-window")) cfg.collapse_window = parse_range(f.collapse_window, "collapse_window");
  if (given("--nu-range")) cfg.nu_range = parse_range(f.nu_range, "nu_range");
  if (given("--uc")) cfg.u_c = f.uc;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discord of spin-1 chains with single-ion anisotropy"};
  app.require_subcommand(1);

  std::map<s1d::Command, Flags> flags;
  std::map<s1d::Command, CLI::App*> subs;
  const std::pair<s1d::Command, const char*> commands[] = {
      {s1d::Command::sweep, "Ground-state discord over a U grid"},
      {s1d::Command::thermal, "Thermal-state discord over U and T grids"},
      {s1d::Command::spectrum, "Lowest energy levels over a U grid"},
      {s1d::Command::scaling, "Critical-point analysis of sweep output"},
  };
  for (const auto& [cmd, help] : commands) {
    auto* sub = app.add_subcommand(s1d::to_string(cmd), help);
    add_run_flags(sub, flags[cmd], cmd);
    if (cmd == s1d::Command::scaling) add_scaling_flags(sub, flags[cmd]);
    subs[cmd] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    for (const auto& [cmd, sub] : subs) {
      if (!sub->parsed()) continue;
      const auto cfg = build_config(sub, flags[cmd], cmd);
      if (cmd == s1d::Command::scaling) {
        const auto report = s1d::run_scaling(cfg);
        if (cfg.out.empty()) std::cout << report.dump(2) << '\n';
      } else {
        const auto summary = s1d::run_sweep(cfg);
        std::cerr << summary.rows_written << " rows written";
        if (summary.rows_resumed) std::cerr << ", " << summary.rows_resumed << " kept from earlier run";
        std::cerr << '\n';
      }
    }
  } catch (const s1d::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const s1d::CapError& e) {
    std::cerr << "resource cap: " << e.what() << '\n';
    return kCap;
  } catch (const s1d::ConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
