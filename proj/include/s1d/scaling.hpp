#pragma once

#include <vector>

#include <json.hpp>

#include "s1d/crit.hpp"
#include "s1d/csv.hpp"
#include "s1d/run_config.hpp"

namespace s1d {

/// Zero-temperature discord curves, one per chain length, sorted by L.
/// Throws ConfigError when the rows mix quantities, repeat a U value, or the
/// sizes do not share one U grid.
std::vector<Curve> curves_from_records(const std::vector<ResultRecord>& rows);

/// Peak table of dD/dU, 1/L extrapolation, crossing of d2D/dU2 and the
/// scaling collapse of d2D/dU2. Stages that cannot run report an "error"
/// member instead of aborting the whole report.
nlohmann::json scaling_report(const std::vector<Curve>& curves, const RunConfig& cfg);

/// Reads cfg.inputs and returns the report; writes it to cfg.out when set.
nlohmann::json run_scaling(const RunConfig& cfg);

}  // namespace s1d
