#include "s1d/run_config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace s1d {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double parse_number(const std::string& s, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(field, "not a number: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw ConfigError(field, "not a number: '" + s + "'");
  return v;
}

int parse_int(const std::string& s, const std::string& field) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(field, "not an integer: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError(field, "not an integer: '" + s + "'");
  return v;
}

// snap to 12 decimals so that e.g. -2 + 170*0.01 prints as -0.3
double snap(double v) { return std::round(v * 1e12) / 1e12; }

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::sweep: return "sweep";
    case Command::thermal: return "thermal";
    case Command::spectrum: return "spectrum";
    case Command::scaling: return "scaling";
  }
  return "?";
}

Command command_from_string(const std::string& s) {
  if (s == "sweep") return Command::sweep;
  if (s == "thermal") return Command::thermal;
  if (s == "spectrum") return Command::spectrum;
  if (s == "scaling") return Command::scaling;
  throw ConfigError("command", "unknown command '" + s + "'");
}

std::string to_string(DiscordKind k) {
  switch (k) {
    case DiscordKind::asymmetric: return "asym";
    case DiscordKind::symmetric: return "sym";
    case DiscordKind::global: return "global";
  }
  return "?";
}

DiscordKind discord_kind_from_string(const std::string& s) {
  if (s == "asym" || s == "asymmetric") return DiscordKind::asymmetric;
  if (s == "sym" || s == "symmetric") return DiscordKind::symmetric;
  if (s == "global") return DiscordKind::global;
  throw ConfigError("kind", "unknown discord kind '" + s + "'");
}

std::vector<double> parse_grid(const std::string& text, const std::string& field) {
  if (text.empty()) throw ConfigError(field, "empty grid");
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError(field, "expected min:max:step");
    const double lo = parse_number(parts[0], field);
    const double hi = parse_number(parts[1], field);
    const double step = parse_number(parts[2], field);
    if (!(step > 0.0)) throw ConfigError(field, "step must be positive");
    if (hi < lo) throw ConfigError(field, "max below min");
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    if (n > 10'000'000) throw ConfigError(field, "grid too large");
    for (long i = 0; i <= n; ++i) values.push_back(snap(lo + static_cast<double>(i) * step));
  } else {
    for (const auto& p : split(text, ',')) values.push_back(parse_number(p, field));
  }
  return values;
}

std::pair<double, double> parse_range(const std::string& text, const std::string& field) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw ConfigError(field, "expected lo:hi");
  const double lo = parse_number(parts[0], field), hi = parse_number(parts[1], field);
  if (!(lo < hi)) throw ConfigError(field, "need lo < hi");
  return {lo, hi};
}

PairSpec PairSpec::parse(const std::string& text) {
  PairSpec p;
  if (text == "central") return p;
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw ConfigError("pair", "expected central, i:j or offset:k, got '" + text + "'");
  if (parts[0] == "offset") {
    p.type = Type::offset;
    p.offset = parse_int(parts[1], "pair");
    if (p.offset < 1) throw ConfigError("pair", "offset must be at least 1");
  } else {
    p.type = Type::indices;
    p.i = parse_int(parts[0], "pair");
    p.j = parse_int(parts[1], "pair");
    if (p.i < 0 || p.j < 0 || p.i == p.j) throw ConfigError("pair", "sites must be distinct and non-negative");
  }
  return p;
}

std::string PairSpec::to_string() const {
  switch (type) {
    case Type::central: return "central";
    case Type::indices: return std::to_string(i) + ":" + std::to_string(j);
    case Type::offset: return "offset:" + std::to_string(offset);
  }
  return "?";
}

std::pair<int, int> PairSpec::resolve(int length, Boundary boundary) const {
  std::pair<int, int> ij;
  switch (type) {
    case Type::central:
      ij = boundary == Boundary::open ? std::pair{length / 2 - 1, length / 2} : std::pair{0, 1};
      break;
    case Type::indices:
      ij = {i, j};
      break;
    case Type::offset: {
      const int start = boundary == Boundary::open ? (length - 1 - offset) / 2 : 0;
      ij = {start, start + offset};
      break;
    }
  }
  if (ij.first < 0 || ij.second < 0 || ij.first >= length || ij.second >= length) {
    throw ConfigError("pair", "pair " + to_string() + " does not fit a chain of " +
                                  std::to_string(length) + " sites");
  }
  return ij;
}

std::vector<PairSpec> parse_pairs(const std::string& text) {
  std::vector<PairSpec> pairs;
  for (const auto& p : split(text, ',')) pairs.push_back(PairSpec::parse(p));
  if (pairs.empty()) throw ConfigError("pair", "empty pair list");
  return pairs;
}

void RunConfig::validate() const {
  try {
    optimizer.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("optimizer", e.what());
  }
  if (workers < 1) throw ConfigError("workers", "must be at least 1");

  if (command == Command::scaling) {
    if (inputs.empty()) throw ConfigError("inputs", "no input files");
    if (!(nu_range.first > 0.0)) throw ConfigError("nu_range", "must be positive");
    return;
  }

  if (lengths.empty()) throw ConfigError("L", "no chain lengths");
  if (u_values.empty()) throw ConfigError("U", "empty grid");
  if (out.empty()) throw ConfigError("out", "output path required");
  for (int L : lengths) {
    if (L < 2) throw ConfigError("L", "chains need at least two sites");
    if (L > kMaxSparseLength) {
      throw CapError("L=" + std::to_string(L) + " exceeds the sparse cap of " +
                     std::to_string(kMaxSparseLength));
    }
  }
  if (command == Command::thermal) {
    if (t_values.empty()) throw ConfigError("T", "empty temperature grid");
    for (double t : t_values) {
      if (!(t > 0.0)) throw ConfigError("T", "temperatures must be positive");
    }
    for (int L : lengths) {
      if (L > kMaxDenseLength) {
        throw CapError("thermal states are limited to L <= " + std::to_string(kMaxDenseLength));
      }
    }
  }
  if (command == Command::spectrum && levels < 1) throw ConfigError("k", "must be at least 1");
  if (command != Command::spectrum && kind == DiscordKind::global) {
    for (int L : lengths) {
      if (L > kMaxGlobalLength) {
        throw CapError("global discord is limited to L <= " + std::to_string(kMaxGlobalLength));
      }
    }
  }
  if (command != Command::spectrum && kind != DiscordKind::global) {
    for (int L : lengths) {
      for (const auto& p : pairs) {
        const Boundary b = L == 2 ? Boundary::open : boundary;
        p.resolve(L, b);
      }
    }
  }
}

void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config", "top level must be an object");
  auto grid = [](const nlohmann::json& v, const std::string& field) {
    if (v.is_string()) return parse_grid(v.get<std::string>(), field);
    if (v.is_number()) return std::vector<double>{v.get<double>()};
    if (v.is_array()) return v.get<std::vector<double>>();
    throw ConfigError(field, "expected a grid string, number or array");
  };
  auto range = [](const nlohmann::json& v, const std::string& field) {
    if (v.is_string()) return parse_range(v.get<std::string>(), field);
    const auto a = v.get<std::vector<double>>();
    if (a.size() != 2 || !(a[0] < a[1])) throw ConfigError(field, "expected [lo, hi]");
    return std::pair{a[0], a[1]};
  };
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "command") cfg.command = command_from_string(v.get<std::string>());
      else if (key == "L") cfg.lengths = v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
      else if (key == "boundary") cfg.boundary = boundary_from_string(v.get<std::string>());
      else if (key == "U") cfg.u_values = grid(v, "U");
      else if (key == "T") cfg.t_values = grid(v, "T");
      else if (key == "pair") cfg.pairs = parse_pairs(v.get<std::string>());
      else if (key == "kind") cfg.kind = discord_kind_from_string(v.get<std::string>());
      else if (key == "mode") cfg.mode = angle_mode_from_string(v.get<std::string>());
      else if (key == "grid_points") cfg.optimizer.coarse_grid = v.get<int>();
      else if (key == "restarts") cfg.optimizer.restarts = v.get<int>();
      else if (key == "tolerance") cfg.optimizer.refine_tolerance = v.get<double>();
      else if (key == "max_evals") cfg.optimizer.max_refine_iters = v.get<int>();
      else if (key == "seed") cfg.optimizer.seed = v.get<std::uint64_t>();
      else if (key == "k") cfg.levels = v.get<int>();
      else if (key == "independent_angles") cfg.independent_angles = v.get<bool>();
      else if (key == "full_opt") cfg.full_opt = v.get<bool>();
      else if (key == "out") cfg.out = v.get<std::string>();
      else if (key == "workers") cfg.workers = v.get<int>();
      else if (key == "resume") cfg.resume = v.get<bool>();
      else if (key == "timing") cfg.timing = v.get<bool>();
      else if (key == "inputs") cfg.inputs = v.get<std::vector<std::string>>();
      else if (key == "peak_window") cfg.peak_window = range(v, key);
      else if (key == "drop_below") cfg.drop_below = v.get<int>();
      else if (key == "cross_window") cfg.cross_window = range(v, key);
      else if (key == "collapse_window") cfg.collapse_window = range(v, key);
      else if (key == "nu_range") cfg.nu_range = range(v, key);
      else if (key == "uc") cfg.u_c = v.get<double>();
      else throw ConfigError(key, "unknown config key");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config", e.what());
  }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", e.what());
  }
  apply_json(cfg, j);
}

int default_workers() {
  if (const char* env = std::getenv("S1D_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace s1d
