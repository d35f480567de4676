#include "s1d/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace s1d {

const char* const kCsvHeader =
    "L,boundary,U,T,pair_i,pair_j,kind,mode,value,theta,alpha,beta,gamma,psi,phi,phi0,degenerate,"
    "gs_energy,seconds";

namespace {

constexpr int kColumns = 19;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_same_v<T, double>) return num(*v);
  else if constexpr (std::is_same_v<T, bool>) return *v ? "1" : "0";
  else return std::to_string(*v);
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad integer '" + s + "'");
  return v;
}

std::optional<double> opt_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return to_double(s);
}

std::optional<int> opt_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return to_int(s);
}

}  // namespace

std::string format_record(const ResultRecord& r) {
  std::string line;
  line.reserve(256);
  auto cell = [&line](const std::string& s) {
    if (!line.empty()) line += ',';
    line += s;
  };
  line = std::to_string(r.L);
  cell(r.boundary);
  cell(num(r.U));
  cell(opt(r.T));
  cell(opt(r.pair_i));
  cell(opt(r.pair_j));
  cell(r.kind);
  cell(r.mode);
  cell(num(r.value));
  if (r.angles) {
    for (double a : {r.angles->theta, r.angles->alpha, r.angles->beta, r.angles->gamma,
                     r.angles->psi, r.angles->phi, r.angles->phi0}) {
      cell(num(a));
    }
  } else {
    for (int k = 0; k < 7; ++k) line += ',';
  }
  cell(opt(r.degenerate));
  cell(opt(r.gs_energy));
  cell(opt(r.seconds));
  return line;
}

ResultRecord parse_record(const std::string& line) {
  std::vector<std::string> f;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    f.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (static_cast<int>(f.size()) != kColumns) {
    throw std::invalid_argument("expected " + std::to_string(kColumns) + " columns, got " +
                                std::to_string(f.size()));
  }
  try {
    ResultRecord r;
    r.L = to_int(f[0]);
    r.boundary = f[1];
    r.U = to_double(f[2]);
    r.T = opt_double(f[3]);
    r.pair_i = opt_int(f[4]);
    r.pair_j = opt_int(f[5]);
    r.kind = f[6];
    r.mode = f[7];
    r.value = to_double(f[8]);
    int filled = 0;
    for (int k = 9; k < 16; ++k) filled += f[k].empty() ? 0 : 1;
    if (filled != 0 && filled != 7) throw std::invalid_argument("partially filled angle columns");
    const bool any = filled == 7;
    if (any) {
      MeasurementAngles a;
      a.theta = to_double(f[9]);
      a.alpha = to_double(f[10]);
      a.beta = to_double(f[11]);
      a.gamma = to_double(f[12]);
      a.psi = to_double(f[13]);
      a.phi = to_double(f[14]);
      a.phi0 = to_double(f[15]);
      r.angles = a;
    }
    if (!f[16].empty()) {
      if (f[16] != "0" && f[16] != "1") throw std::invalid_argument("degenerate must be 0 or 1");
      r.degenerate = f[16] == "1";
    }
    r.gs_energy = opt_double(f[17]);
    r.seconds = opt_double(f[18]);
    return r;
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("numeric field out of range");
  }
}

std::vector<ResultRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::invalid_argument("missing or unexpected CSV header");
  std::vector<ResultRecord> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      rows.push_back(parse_record(line));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

std::vector<ResultRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return read_csv(in);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

}  // namespace s1d
