#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "s1d/discord.hpp"
#include "s1d/model.hpp"

namespace s1d {

/// Invalid run configuration. `field` names the offending setting.
struct ConfigError : std::invalid_argument {
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field(std::move(field)) {}
  std::string field;
};

enum class Command { sweep, thermal, spectrum, scaling };
enum class DiscordKind { asymmetric, symmetric, global };

std::string to_string(Command c);
Command command_from_string(const std::string& s);
std::string to_string(DiscordKind k);  // asym, sym, global
DiscordKind discord_kind_from_string(const std::string& s);

/// "min:max:step", a comma list, or a single value. Grid points are
/// min + i*step up to max inclusive (within 1e-9 steps).
std::vector<double> parse_grid(const std::string& text, const std::string& field);

struct PairSpec {
  enum class Type { central, indices, offset };
  Type type = Type::central;
  int i = 0, j = 1;  // Type::indices
  int offset = 1;    // Type::offset

  /// central | i:j | offset:k
  static PairSpec parse(const std::string& text);
  std::string to_string() const;
  /// Site pair on a chain of `length` sites. Offset pairs sit in the middle
  /// of open chains and start at site 0 on rings.
  std::pair<int, int> resolve(int length, Boundary boundary) const;
};

/// Comma-separated list of pair specs.
std::vector<PairSpec> parse_pairs(const std::string& text);

struct RunConfig {
  Command command = Command::sweep;
  std::vector<int> lengths;
  Boundary boundary = Boundary::open;
  std::vector<double> u_values;
  std::vector<double> t_values;
  std::vector<PairSpec> pairs{PairSpec{}};
  DiscordKind kind = DiscordKind::symmetric;
  AngleMode mode = AngleMode::full;
  OptimizerConfig optimizer;
  int levels = 3;                   // spectrum
  bool independent_angles = false;  // global discord with per-site angles
  bool full_opt = false;            // optimize global discord above 6 sites
  std::string out;
  int workers = 1;
  bool resume = false;
  bool timing = false;

  // scaling
  std::vector<std::string> inputs;
  std::optional<std::pair<double, double>> peak_window;
  int drop_below = 0;
  std::pair<double, double> cross_window{0.93, 1.00};
  std::optional<std::pair<double, double>> collapse_window;
  std::pair<double, double> nu_range{0.5, 3.0};
  std::optional<double> u_c;

  /// Throws ConfigError or CapError.
  void validate() const;
};

/// Overwrites fields present in a JSON object. Keys follow the long flag
/// names with '-' replaced by '_'.
void apply_json(RunConfig& cfg, const nlohmann::json& j);
void load_config_file(RunConfig& cfg, const std::string& path);

/// "lo:hi" with lo < hi.
std::pair<double, double> parse_range(const std::string& text, const std::string& field);

/// Default worker count from S1D_WORKERS, else 1.
int default_workers();

}  // namespace s1d
