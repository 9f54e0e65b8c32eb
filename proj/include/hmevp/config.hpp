#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hmevp/errors.hpp"
#include "hmevp/filter.hpp"

namespace hmevp {

enum class Preset { landau_1d, landau_2d, two_stream, free_stream };
enum class SolverKind { hme, dvm };

inline std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::landau_1d: return "landau_1d";
    case Preset::landau_2d: return "landau_2d";
    case Preset::two_stream: return "two_stream";
    case Preset::free_stream: return "free_stream";
  }
  return "landau_1d";
}

inline std::string_view to_string(SolverKind s) { return s == SolverKind::hme ? "hme" : "dvm"; }

/// All run parameters. Lengths follow from the preset and wave numbers:
/// L = 2 pi / k in 1D, L_x = L_y = 4 pi / k_x in 2D.
struct SimConfig {
  Preset preset = Preset::landau_1d;
  SolverKind solver = SolverKind::hme;
  int order = 50;
  int nx = 800;
  int ny = 800;
  double k = 0.3;
  double ky = 0.3;
  double amplitude = 1e-3;
  double u0 = 1.0;
  double uth0 = 0.5;
  double rho0 = 1.0;
  double cfl = 0.45;
  double t_end = 50.0;
  FilterSpec filter;
  int sample_stride = 1;
  std::vector<double> spectrum_times;
  double dvm_dv = 0.05;
  double dvm_v_max = 0.0;  // 0 selects 6 (Maxwellian) or |u0| + 8 uth0 (two streams)
  double fit_t_start = 2.0;
  double fit_t_end = -1.0;  // negative selects t_end
  std::vector<int> sweep_n;
  std::vector<int> sweep_m;
  std::vector<double> sweep_cfl;

  int dim() const { return preset == Preset::landau_2d ? 2 : 1; }

  std::array<double, 2> lengths() const {
    constexpr double two_pi = 6.283185307179586;
    if (preset == Preset::landau_2d) return {2.0 * two_pi / k, 2.0 * two_pi / k};
    return {two_pi / k, 0.0};
  }

  double fit_end() const { return fit_t_end < 0.0 ? t_end : fit_t_end; }

  double dvm_velocity_bound() const {
    if (dvm_v_max > 0.0) return dvm_v_max;
    if (preset == Preset::two_stream) return std::abs(u0) + 8.0 * uth0;
    return 6.0;
  }

  void validate() const {
    if (order < 2) throw ConfigError("M must be >= 2");
    if (nx < 3) throw ConfigError("N must be >= 3");
    if (dim() == 2 && ny < 3) throw ConfigError("Ny must be >= 3");
    if (!(k > 0.0)) throw ConfigError("k must be positive");
    if (dim() == 2 && !(ky > 0.0)) throw ConfigError("ky must be positive");
    if (!(cfl > 0.0)) throw ConfigError("cfl must be positive");
    if (!(t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
    if (sample_stride < 1) throw ConfigError("sample_stride must be >= 1");
    if (!(dvm_dv > 0.0)) throw ConfigError("dvm.dv must be positive");
    if (preset == Preset::two_stream && !(uth0 > 0.0)) throw ConfigError("uth0 must be positive");
    if (solver == SolverKind::dvm && preset == Preset::landau_2d) {
      throw ConfigError("solver dvm supports 1D presets only");
    }
    try {
      filter.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

/// Ordered key/value pairs as read from text or the command line.
using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("config key '" + key + "': invalid number '" + v + "'");
  return out;
}

inline int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("config key '" + key + "': invalid integer '" + v + "'");
  return out;
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& key, const std::string& v, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse(key, item));
  }
  return out;
}

// Shortest text that reads back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

template <class T>
std::string format_list(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(xs[i]);
    } else {
      out += std::to_string(xs[i]);
    }
  }
  return out;
}

}  // namespace detail

/// Parses `key = value` lines; '#' starts a comment. Reports the line number
/// of malformed lines.
inline ConfigEntries parse_config_text(std::string_view text) {
  ConfigEntries out;
  std::stringstream ss{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = detail::trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out.emplace_back(std::move(key), detail::trim(std::string_view(t).substr(eq + 1)));
  }
  return out;
}

inline ConfigEntries read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

/// Preset defaults before any key is applied.
inline SimConfig preset_defaults(Preset p) {
  SimConfig c;
  c.preset = p;
  switch (p) {
    case Preset::landau_1d:
      break;
    case Preset::landau_2d:
      c.order = 40;
      c.nx = c.ny = 64;
      c.t_end = 20.0;
      break;
    case Preset::two_stream:
      c.order = 60;
      c.k = 0.5;
      c.t_end = 40.0;
      break;
    case Preset::free_stream:
      c.nx = 400;
      c.k = 0.5;
      c.amplitude = 0.5;
      c.t_end = 20.0;
      break;
  }
  return c;
}

inline Preset preset_from_string(const std::string& s) {
  if (s == "landau_1d") return Preset::landau_1d;
  if (s == "landau_2d") return Preset::landau_2d;
  if (s == "two_stream") return Preset::two_stream;
  if (s == "free_stream") return Preset::free_stream;
  throw ConfigError("config key 'preset': unknown preset '" + s + "'");
}

/// Applies one key. Unknown keys are rejected by name.
inline void apply_config_entry(SimConfig& c, const std::string& key, const std::string& v) {
  using detail::parse_double;
  using detail::parse_int;
  if (key == "preset") {
    if (preset_from_string(v) != c.preset) throw ConfigError("config key 'preset' cannot be changed after defaults are resolved");
  } else if (key == "solver") {
    if (v == "hme") c.solver = SolverKind::hme;
    else if (v == "dvm") c.solver = SolverKind::dvm;
    else throw ConfigError("config key 'solver': expected hme or dvm, got '" + v + "'");
  } else if (key == "M") {
    c.order = parse_int(key, v);
  } else if (key == "N") {
    c.nx = parse_int(key, v);
    if (c.preset == Preset::landau_2d) c.ny = c.nx;
  } else if (key == "Ny") {
    c.ny = parse_int(key, v);
  } else if (key == "k") {
    c.k = parse_double(key, v);
  } else if (key == "ky") {
    c.ky = parse_double(key, v);
  } else if (key == "amplitude") {
    c.amplitude = parse_double(key, v);
  } else if (key == "u0") {
    c.u0 = parse_double(key, v);
  } else if (key == "uth0") {
    c.uth0 = parse_double(key, v);
  } else if (key == "rho0") {
    c.rho0 = parse_double(key, v);
  } else if (key == "cfl") {
    c.cfl = parse_double(key, v);
  } else if (key == "t_end") {
    c.t_end = parse_double(key, v);
  } else if (key == "filter.kind") {
    try {
      c.filter.kind = filter_kind_from_string(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config key 'filter.kind': ") + e.what());
    }
  } else if (key == "filter.beta") {
    c.filter.beta = parse_double(key, v);
  } else if (key == "filter.gamma") {
    c.filter.gamma = parse_double(key, v);
  } else if (key == "filter.cutoff") {
    c.filter.cutoff = parse_double(key, v);
  } else if (key == "filter.t0") {
    c.filter.t0 = parse_double(key, v);
  } else if (key == "filter.m0") {
    c.filter.protected_order = parse_int(key, v);
  } else if (key == "sample_stride") {
    c.sample_stride = parse_int(key, v);
  } else if (key == "spectrum_times") {
    c.spectrum_times = detail::parse_list<double>(key, v, parse_double);
  } else if (key == "dvm.dv") {
    c.dvm_dv = parse_double(key, v);
  } else if (key == "dvm.v_max") {
    c.dvm_v_max = parse_double(key, v);
  } else if (key == "fit.t_start") {
    c.fit_t_start = parse_double(key, v);
  } else if (key == "fit.t_end") {
    c.fit_t_end = parse_double(key, v);
  } else if (key == "sweep.N") {
    c.sweep_n = detail::parse_list<int>(key, v, parse_int);
  } else if (key == "sweep.M") {
    c.sweep_m = detail::parse_list<int>(key, v, parse_int);
  } else if (key == "sweep.cfl") {
    c.sweep_cfl = detail::parse_list<double>(key, v, parse_double);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

/// Builds a config: the last `preset` entry selects the defaults, then every
/// other entry is applied in order (later entries override earlier ones).
inline SimConfig build_config(const ConfigEntries& entries) {
  Preset preset = Preset::landau_1d;
  for (const auto& [key, value] : entries) {
    if (key == "preset") preset = preset_from_string(value);
  }
  SimConfig c = preset_defaults(preset);
  for (const auto& [key, value] : entries) {
    if (key != "preset") apply_config_entry(c, key, value);
  }
  c.validate();
  return c;
}

inline SimConfig parse_config(std::string_view text) { return build_config(parse_config_text(text)); }

/// Every key with full precision, in a form parse_config accepts.
inline std::string to_text(const SimConfig& c) {
  using detail::format_double;
  std::ostringstream os;
  os << "preset = " << to_string(c.preset) << "\n";
  os << "solver = " << to_string(c.solver) << "\n";
  os << "M = " << c.order << "\n";
  os << "N = " << c.nx << "\n";
  os << "Ny = " << c.ny << "\n";
  os << "k = " << format_double(c.k) << "\n";
  os << "ky = " << format_double(c.ky) << "\n";
  os << "amplitude = " << format_double(c.amplitude) << "\n";
  os << "u0 = " << format_double(c.u0) << "\n";
  os << "uth0 = " << format_double(c.uth0) << "\n";
  os << "rho0 = " << format_double(c.rho0) << "\n";
  os << "cfl = " << format_double(c.cfl) << "\n";
  os << "t_end = " << format_double(c.t_end) << "\n";
  os << "filter.kind = " << to_string(c.filter.kind) << "\n";
  os << "filter.beta = " << format_double(c.filter.beta) << "\n";
  os << "filter.gamma = " << format_double(c.filter.gamma) << "\n";
  os << "filter.cutoff = " << format_double(c.filter.cutoff) << "\n";
  os << "filter.t0 = " << format_double(c.filter.t0) << "\n";
  os << "filter.m0 = " << c.filter.protected_order << "\n";
  os << "sample_stride = " << c.sample_stride << "\n";
  os << "spectrum_times = " << detail::format_list(c.spectrum_times) << "\n";
  os << "dvm.dv = " << format_double(c.dvm_dv) << "\n";
  os << "dvm.v_max = " << format_double(c.dvm_v_max) << "\n";
  os << "fit.t_start = " << format_double(c.fit_t_start) << "\n";
  os << "fit.t_end = " << format_double(c.fit_t_end) << "\n";
  os << "sweep.N = " << detail::format_list(c.sweep_n) << "\n";
  os << "sweep.M = " << detail::format_list(c.sweep_m) << "\n";
  os << "sweep.cfl = " << detail::format_list(c.sweep_cfl) << "\n";
  return os.str();
}

}  // namespace hmevp
