#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "s1d/measure.hpp"

namespace s1d {

/// One output row. Optional fields are written as empty cells.
struct ResultRecord {
  int L = 0;
  std::string boundary;
  double U = 0.0;
  std::optional<double> T;
  std::optional<int> pair_i, pair_j;
  std::string kind;  // asym, sym, global, or E<n> for spectrum levels
  std::string mode;
  double value = 0.0;
  std::optional<MeasurementAngles> angles;
  std::optional<bool> degenerate;
  std::optional<double> gs_energy;
  std::optional<double> seconds;

  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

extern const char* const kCsvHeader;

/// %.17g formatting, no trailing newline.
std::string format_record(const ResultRecord& r);
/// Inverse of format_record. Throws std::invalid_argument on malformed rows.
ResultRecord parse_record(const std::string& line);

/// Reads a whole file, checking the header.
std::vector<ResultRecord> read_csv(const std::string& path);
std::vector<ResultRecord> read_csv(std::istream& in);

}  // namespace s1d
