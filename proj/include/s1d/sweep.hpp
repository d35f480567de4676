#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "s1d/csv.hpp"
#include "s1d/run_config.hpp"

namespace s1d {

/// One grid point. Every requested pair at that point is evaluated together
/// so the eigensolve is shared.
struct WorkItem {
  int L = 0;
  Boundary boundary = Boundary::open;
  double U = 0.0;
  std::optional<double> T;
};

/// Grid points in output order: L outermost, then U, then T.
std::vector<WorkItem> plan_work(const RunConfig& cfg);

/// Rows produced by one item, with the input columns filled in.
std::vector<ResultRecord> row_skeletons(const RunConfig& cfg, const WorkItem& item);

/// Computes all rows of one item. `cfg` must be validated.
std::vector<ResultRecord> evaluate_item(const RunConfig& cfg, const WorkItem& item);

struct RunSummary {
  std::size_t rows_written = 0;
  std::size_t rows_resumed = 0;  // complete rows kept from an earlier run
};

/// Runs a sweep, thermal or spectrum command into cfg.out. Rows are
/// flushed per grid point in plan order. With cfg.resume, complete rows of
/// an existing file are checked against the plan and kept.
RunSummary run_sweep(const RunConfig& cfg);

}  // namespace s1d
