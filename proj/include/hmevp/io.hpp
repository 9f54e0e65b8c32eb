#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmevp/config.hpp"
#include "hmevp/diagnostics.hpp"
#include "hmevp/run_record.hpp"

namespace hmevp {

/// Column names of series.csv. 2D records carry two extra columns.
inline std::vector<std::string> series_columns(int dim) {
  std::vector<std::string> cols{"t", "E", "mass", "momentum", "energy"};
  if (dim == 2) {
    cols.push_back("momentum_y");
    cols.push_back("energy_single_temp");
  }
  return cols;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) {
    while (!item.empty() && (item.back() == '\r' || item.back() == ' ')) item.pop_back();
    out.push_back(item);
  }
  return out;
}

}  // namespace detail

inline void write_series_csv(std::ostream& os, const TimeSeries& series, int dim) {
  const auto cols = series_columns(dim);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& r : series) {
    os << detail::format_double(r.t) << "," << detail::format_double(r.field) << "," << detail::format_double(r.mass) << ","
       << detail::format_double(r.momentum) << "," << detail::format_double(r.energy);
    if (dim == 2) os << "," << detail::format_double(r.momentum_y) << "," << detail::format_double(r.energy_single_temp);
    os << "\n";
  }
}

inline void write_series_csv(const std::string& path, const RunRecord& rec) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  write_series_csv(os, rec.series, rec.dim);
}

/// Reads series.csv by column name; a missing required column is an error
/// naming the column.
inline TimeSeries read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("series.csv: empty file");
  const auto header = detail::split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const auto& name : series_columns(1)) {
    if (!col.count(name)) throw std::runtime_error("series.csv: missing column '" + name + "'");
  }
  auto get = [&](const std::vector<std::string>& f, const std::string& name, int lineno) {
    const auto it = col.find(name);
    if (it == col.end()) return 0.0;
    if (it->second >= f.size()) {
      throw std::runtime_error("series.csv line " + std::to_string(lineno) + ": too few fields");
    }
    return std::stod(f[it->second]);
  };
  TimeSeries out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    SeriesRow r;
    r.t = get(f, "t", lineno);
    r.field = get(f, "E", lineno);
    r.mass = get(f, "mass", lineno);
    r.momentum = get(f, "momentum", lineno);
    r.energy = get(f, "energy", lineno);
    r.momentum_y = get(f, "momentum_y", lineno);
    r.energy_single_temp = get(f, "energy_single_temp", lineno);
    out.push_back(r);
  }
  return out;
}

inline TimeSeries read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  return read_series_csv(in);
}

/// Columns grade,norm.
inline void write_spectrum_csv(const std::string& path, const SpectrumSnapshot& s) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  os << "grade,norm\n";
  for (std::size_t g = 0; g < s.norms.size(); ++g) os << g << "," << detail::format_double(s.norms[g]) << "\n";
}

}  // namespace hmevp
