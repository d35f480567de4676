#include "s1d/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <tuple>

namespace s1d {

namespace {

constexpr int kSmallestReliableSize = 16;
constexpr double kGridMatchTol = 1e-9;

}  // namespace

std::vector<Curve> curves_from_records(const std::vector<ResultRecord>& rows) {
  using Quantity = std::tuple<std::string, std::string, std::string, int>;  // kind, mode, boundary, j - i
  std::optional<Quantity> quantity;
  std::map<int, std::vector<std::pair<double, double>>> by_size;
  std::map<int, std::string> pair_label;

  for (const auto& r : rows) {
    if (r.T || r.kind.empty() || r.kind[0] == 'E') continue;
    const int sep = r.pair_i && r.pair_j ? *r.pair_j - *r.pair_i : 0;
    const Quantity q{r.kind, r.mode, r.boundary, sep};
    if (!quantity) quantity = q;
    if (*quantity != q) throw ConfigError("inputs", "rows mix different quantities (kind, mode, boundary or pair)");
    by_size[r.L].emplace_back(r.U, r.value);
    if (r.pair_i && r.pair_j) {
      pair_label[r.L] = std::to_string(*r.pair_i) + ":" + std::to_string(*r.pair_j);
    }
  }
  if (by_size.empty()) throw ConfigError("inputs", "no zero-temperature discord rows");

  std::vector<Curve> curves;
  for (auto& [L, pts] : by_size) {
    std::sort(pts.begin(), pts.end());
    Curve c;
    c.L = L;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (k > 0 && pts[k].first == pts[k - 1].first) {
        throw ConfigError("inputs", "L=" + std::to_string(L) + " repeats U=" + std::to_string(pts[k].first));
      }
      c.xs.push_back(pts[k].first);
      c.ys.push_back(pts[k].second);
    }
    c.boundary = std::get<2>(*quantity);
    c.mode = std::get<1>(*quantity);
    c.pair = pair_label.count(L) ? pair_label[L] : "";
    curves.push_back(std::move(c));
  }

  const auto& ref = curves.front();
  for (const auto& c : curves) {
    bool same = c.xs.size() == ref.xs.size();
    for (std::size_t k = 0; same && k < c.xs.size(); ++k) {
      same = std::abs(c.xs[k] - ref.xs[k]) <= kGridMatchTol;
    }
    if (!same) {
      throw ConfigError("inputs", "U grids differ between L=" + std::to_string(ref.L) + " and L=" +
                                      std::to_string(c.L));
    }
    try {
      c.validate(4);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("inputs", "L=" + std::to_string(c.L) + ": " + e.what());
    }
  }
  return curves;
}

nlohmann::json scaling_report(const std::vector<Curve>& curves, const RunConfig& cfg) {
  using nlohmann::json;
  if (curves.size() < 3) throw ConfigError("inputs", "need at least three chain lengths");

  json report;
  json sizes = json::array();
  for (const auto& c : curves) sizes.push_back(c.L);
  report["sizes"] = sizes;
  report["quantity"] = {{"boundary", curves.front().boundary}, {"mode", curves.front().mode}};
  report["warnings"] = json::array();

  // first derivative peaks
  const auto [peak_lo, peak_hi] =
      cfg.peak_window.value_or(std::pair{curves.front().xs.front(), curves.front().xs.back()});
  report["peak_window"] = {peak_lo, peak_hi};
  std::vector<int> ls;
  std::vector<double> peaks;
  json table = json::array();
  for (const auto& c : curves) {
    const auto p = peak_location(derivative(c, 1), peak_lo, peak_hi);
    table.push_back({{"L", c.L}, {"u_peak", p.x}, {"slope_peak", p.y}, {"at_edge", p.at_edge}});
    if (p.at_edge) {
      report["warnings"].push_back("derivative maximum of L=" + std::to_string(c.L) +
                                   " sits at the edge of the peak window");
    }
    ls.push_back(c.L);
    peaks.push_back(p.x);
  }
  report["peaks"] = table;

  try {
    const auto ex = extrapolate_critical(ls, peaks, cfg.drop_below);
    report["extrapolation"] = {{"u_c", ex.u_c}, {"slope", ex.slope}, {"residual", ex.residual},
                               {"sizes_used", ex.used}, {"drop_below", cfg.drop_below}};
  } catch (const std::invalid_argument& e) {
    report["extrapolation"] = {{"error", e.what()}};
  }

  // second derivative crossing and collapse
  std::vector<Curve> second;
  for (const auto& c : curves) second.push_back(derivative(c, 2));
  const auto [cross_lo, cross_hi] = cfg.cross_window;
  std::optional<double> u_star;
  try {
    const auto cr = crossing_point(second, cross_lo, cross_hi);
    u_star = cr.u_star;
    report["crossing"] = {{"u_star", cr.u_star}, {"spread", cr.spread}, {"pairwise", cr.pairwise},
                          {"window", {cross_lo, cross_hi}}};
  } catch (const std::exception& e) {
    report["crossing"] = {{"error", e.what()}, {"window", {cross_lo, cross_hi}}};
  }

  const auto u_c = cfg.u_c ? cfg.u_c : u_star;
  if (!u_c) {
    report["collapse"] = {{"error", "no critical coupling: crossing failed and none was given"}};
  } else {
    const auto [lo, hi] = cfg.collapse_window.value_or(cfg.cross_window);
    std::vector<Curve> windowed;
    for (const auto& c : second) windowed.push_back(c.window(lo, hi));
    try {
      const auto fit = fss_collapse(windowed, *u_c, cfg.nu_range.first, cfg.nu_range.second);
      report["collapse"] = {{"u_c", fit.u_c},           {"nu", fit.nu},
                            {"nu_err", fit.nu_err},     {"residual", fit.residual},
                            {"reliable", fit.reliable}, {"window", {lo, hi}},
                            {"nu_range", {cfg.nu_range.first, cfg.nu_range.second}}};
      if (!fit.reliable) report["warnings"].push_back("collapse cost is flat or minimal at the edge of the nu range");
    } catch (const std::invalid_argument& e) {
      report["collapse"] = {{"error", e.what()}};
    }
  }

  if (curves.back().L < kSmallestReliableSize) {
    report["warnings"].push_back("largest chain has L=" + std::to_string(curves.back().L) +
                                 "; estimates from such short chains carry sizeable finite-size drift");
  }
  return report;
}

nlohmann::json run_scaling(const RunConfig& cfg) {
  cfg.validate();
  std::vector<ResultRecord> rows;
  for (const auto& path : cfg.inputs) {
    try {
      auto part = read_csv(path);
      rows.insert(rows.end(), part.begin(), part.end());
    } catch (const std::invalid_argument& e) {
      throw ConfigError("inputs", e.what());
    }
  }
  auto report = scaling_report(curves_from_records(rows), cfg);
  if (!cfg.out.empty()) {
    std::ofstream out(cfg.out);
    if (!out) throw ConfigError("out", "cannot write " + cfg.out);
    out << report.dump(2) << '\n';
  }
  return report;
}

}  // namespace s1d
