#pragma once

#include <fftw3.h>

#include <CLI11.hpp>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hmevp/hmevp.hpp"

namespace hmevp::cli {

namespace fs = std::filesystem;

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;

/// Turns leftover `--key value` / `--key=value` arguments into config entries.
inline ConfigEntries overrides_from_args(const std::vector<std::string>& rest) {
  ConfigEntries out;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const std::string& a = rest[i];
    if (a.rfind("--", 0) != 0 || a.size() == 2) throw ConfigError("unexpected argument '" + a + "'");
    const std::string body = a.substr(2);
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else {
      if (i + 1 >= rest.size()) throw ConfigError("missing value for '--" + body + "'");
      out.emplace_back(body, rest[++i]);
    }
  }
  return out;
}

/// File entries first, command-line entries after, so flags win.
inline SimConfig load_config(const std::string& path, const std::vector<std::string>& rest) {
  ConfigEntries entries;
  if (!path.empty()) entries = read_config_file(path);
  const auto extra = overrides_from_args(rest);
  entries.insert(entries.end(), extra.begin(), extra.end());
  return build_config(entries);
}

/// Creates `dir`; an existing path is an error unless `force`.
inline void prepare_output_dir(const std::string& dir, bool force) {
  if (dir.empty()) throw ConfigError("--out is required");
  if (fs::exists(dir)) {
    if (!force) throw ConfigError("output directory '" + dir + "' already exists (use --force)");
    if (!fs::is_directory(dir)) throw ConfigError("output path '" + dir + "' is not a directory");
  }
  fs::create_directories(dir);
}

inline std::string meta_text(const RunRecord& rec) {
  std::ostringstream os;
  os << "# hmevp " << HMEVP_VERSION << "\n";
  os << "# fftw " << fftw_version << "\n";
  os << "# steps " << rec.steps << "\n";
  os << "# wall_seconds " << rec.wall_seconds << "\n";
  if (rec.failed) {
    os << "# status failed at t = " << detail::format_double(rec.failure_time) << ", cell " << rec.failure_cell << ": "
       << rec.failure << "\n";
  } else {
    os << "# status ok\n";
  }
  os << rec.config_echo;
  return os.str();
}

inline std::string spectrum_name(double t) {
  std::ostringstream os;
  os << "spectrum_" << t << ".csv";
  return os.str();
}

/// series.csv, meta.txt and one spectrum_<t>.csv per snapshot.
inline void write_run_outputs(const std::string& dir, const RunRecord& rec) {
  write_series_csv((fs::path(dir) / "series.csv").string(), rec);
  std::ofstream meta(fs::path(dir) / "meta.txt");
  meta << meta_text(rec);
  for (const auto& s : rec.spectra) write_spectrum_csv((fs::path(dir) / spectrum_name(s.t)).string(), s);
}

struct FitResult {
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double omega = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  std::size_t peaks = 0;
  std::string note;
};

/// Peak-envelope damping rate and frequency over [t_a, t_b].
inline FitResult fit_series(const TimeSeries& series, double t_a, double t_b) {
  FitResult r;
  if (series.size() < 3) {
    r.note = "too few samples";
    return r;
  }
  const auto peaks = peaks_in_window(find_peaks(series), t_a, t_b);
  r.peaks = peaks.peaks.size();
  if (r.peaks < 2) {
    r.note = "fewer than two peaks";
    return r;
  }
  const auto fit = fit_damping_rate(peaks, t_a, t_b);
  r.gamma = fit.slope;
  r.residual = fit.residual;
  r.omega = estimate_frequency(peaks);
  return r;
}

inline int cmd_run(const std::string& config_path, const std::vector<std::string>& rest, const std::string& out,
                   bool force, std::ostream& log, std::ostream& err) {
  SimConfig config;
  try {
    config = load_config(config_path, rest);
    prepare_output_dir(out, force);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  RunRecord rec;
  try {
    rec = run(config);
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  write_run_outputs(out, rec);
  if (rec.failed) {
    err << "error: run aborted at t = " << rec.failure_time << " in cell " << rec.failure_cell << ": "
        << rec.failure << "\n";
    return kFailure;
  }
  log << "steps " << rec.steps << ", wall " << rec.wall_seconds << " s, wrote " << out << "\n";
  return kOk;
}

struct SweepRow {
  std::string name;
  int n = 0;
  int order = 0;
  double cfl = 0.0;
  double dx = 0.0;
  FitResult fit;
  std::string status;
};

struct Extrapolation {
  int order = 0;
  double cfl = 0.0;
  std::size_t points = 0;
  double slope = 0.0;
  double gamma0 = 0.0;
};

/// Least-squares gamma vs dx per (M, CFL) group with at least two distinct N.
inline std::vector<Extrapolation> extrapolate_sweep(const std::vector<SweepRow>& rows) {
  std::vector<Extrapolation> out;
  std::vector<std::pair<int, double>> groups;
  for (const auto& r : rows) {
    const std::pair<int, double> g{r.order, r.cfl};
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }
  for (const auto& [order, cfl] : groups) {
    std::vector<double> x, y;
    for (const auto& r : rows) {
      if (r.order == order && r.cfl == cfl && r.status == "ok" && std::isfinite(r.fit.gamma)) {
        x.push_back(r.dx);
        y.push_back(r.fit.gamma);
      }
    }
    if (x.size() < 2 || std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) continue;
    const auto fit = least_squares_line(x, y);
    out.push_back({order, cfl, x.size(), fit.slope, fit.intercept});
  }
  return out;
}

inline int cmd_sweep(const std::string& config_path, const std::vector<std::string>& rest, const std::string& out,
                     bool force, int jobs, std::ostream& log, std::ostream& err) {
  SimConfig base;
  try {
    base = load_config(config_path, rest);
    prepare_output_dir(out, force);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  const auto ns = base.sweep_n.empty() ? std::vector<int>{base.nx} : base.sweep_n;
  const auto ms = base.sweep_m.empty() ? std::vector<int>{base.order} : base.sweep_m;
  const auto cfls = base.sweep_cfl.empty() ? std::vector<double>{base.cfl} : base.sweep_cfl;

  std::vector<SweepRow> rows;
  std::vector<SimConfig> configs;
  for (int m : ms) {
    for (double cfl : cfls) {
      for (int n : ns) {
        SimConfig c = base;
        c.nx = n;
        if (c.dim() == 2) c.ny = n;
        c.order = m;
        c.cfl = cfl;
        c.sweep_n.clear();
        c.sweep_m.clear();
        c.sweep_cfl.clear();
        SweepRow r;
        std::ostringstream name;
        name << "N" << n << "_M" << m << "_cfl" << cfl;
        r.name = name.str();
        r.n = n;
        r.order = m;
        r.cfl = cfl;
        r.dx = c.lengths()[0] / n;
        rows.push_back(r);
        configs.push_back(c);
      }
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      auto& row = rows[i];
      const std::string dir = (fs::path(out) / row.name).string();
      try {
        configs[i].validate();
        fs::create_directories(dir);
        const RunRecord rec = run(configs[i]);
        write_run_outputs(dir, rec);
        row.fit = fit_series(rec.series, configs[i].fit_t_start, configs[i].fit_end());
        row.status = rec.failed ? "failed" : "ok";
        if (rec.failed) row.fit.note = rec.failure;
      } catch (const std::exception& e) {
        row.status = "failed";
        row.fit.note = e.what();
      }
      std::lock_guard<std::mutex> lock(log_mutex);
      log << row.name << ": " << row.status << " gamma " << row.fit.gamma << " omega " << row.fit.omega << "\n";
    }
  };
  std::vector<std::thread> pool;
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(rows.size())));
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ofstream summary(fs::path(out) / "summary.csv");
  summary << "name,N,M,cfl,dx,gamma,omega,fit_residual,peaks,status,note\n";
  bool any_failed = false;
  for (const auto& r : rows) {
    std::string note = r.fit.note;
    std::replace(note.begin(), note.end(), ',', ';');
    summary << r.name << "," << r.n << "," << r.order << "," << detail::format_double(r.cfl) << "," << detail::format_double(r.dx)
            << "," << detail::format_double(r.fit.gamma) << "," << detail::format_double(r.fit.omega) << ","
            << detail::format_double(r.fit.residual) << "," << r.fit.peaks << "," << r.status << "," << note << "\n";
    any_failed = any_failed || r.status != "ok";
  }
  const auto ext = extrapolate_sweep(rows);
  std::ofstream extra(fs::path(out) / "extrapolation.csv");
  extra << "M,cfl,points,slope,gamma_dx0\n";
  for (const auto& e : ext) {
    extra << e.order << "," << detail::format_double(e.cfl) << "," << e.points << "," << detail::format_double(e.slope) << ","
          << detail::format_double(e.gamma0) << "\n";
    log << "M " << e.order << " cfl " << e.cfl << ": gamma extrapolated to dx -> 0 = " << e.gamma0 << "\n";
  }
  return any_failed ? kFailure : kOk;
}

inline int cmd_validate_filter(const std::string& config_path, const std::vector<std::string>& rest,
                               const std::vector<int>& orders, const std::vector<double>& dts, std::ostream& log,
                               std::ostream& err) {
  SimConfig config;
  try {
    config = load_config(config_path, rest);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  auto mark = [](bool ok) { return ok ? "pass" : "FAIL"; };
  bool all = true;
  log << "filter " << to_string(config.filter.kind) << " beta " << config.filter.beta << " gamma "
      << config.filter.gamma << "\n";
  for (int m : orders) {
    for (double dt : dts) {
      FilterValidation v;
      try {
        v = validate_filter(config.filter, m, dt);
      } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
      }
      log << "M " << m << " dt " << dt << ": (a) rotational " << mark(v.rotational) << ", (b) conservation "
          << mark(v.conservation) << ", (c) monotone " << mark(v.monotone) << ", (d) limit " << mark(v.limit)
          << "\n";
      all = all && v.all();
    }
  }
  log << (all ? "all conditions hold\n" : "some conditions fail\n");
  return all ? kOk : kFailure;
}

struct RecurrenceDemoOptions {
  double amplitude = 0.5;
  double k = 0.5;
  double dv = std::numbers::pi / 10.0;
  int order = 50;
  double x = 0.0;
  double t_end = 60.0;
  double dt = 0.05;
};

inline int cmd_recurrence_demo(const RecurrenceDemoOptions& o, const std::string& out, bool force, std::ostream& log,
                               std::ostream& err) {
  try {
    if (!(o.dv > 0.0) || !(o.dt > 0.0) || o.order < 1 || !(o.t_end >= 0.0)) {
      throw ConfigError("recurrence-demo: dv, dt must be positive, M >= 1, t_end >= 0");
    }
    prepare_output_dir(out, force);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  const int half = dvm_half_width(o.dv);
  std::ofstream csv(fs::path(out) / "recurrence.csv");
  csv << "t,exact,dvm,hermite\n";
  const long steps = std::lround(o.t_end / o.dt);
  for (long i = 0; i <= steps; ++i) {
    const double t = i * o.dt;
    csv << detail::format_double(t) << "," << detail::format_double(exact_free_streaming_density(o.x, t, o.amplitude, o.k)) << ","
        << detail::format_double(dvm_density(o.x, t, o.amplitude, o.k, o.dv, half)) << ","
        << detail::format_double(hermite_collocation_density(o.x, t, o.amplitude, o.k, o.order)) << "\n";
  }
  log << "dvm recurrence period " << dvm_recurrence_time(o.k, o.dv) << ", Hermite estimate "
      << recurrence_time_estimate(o.order, o.k) << "\n";
  return kOk;
}

inline int cmd_fit(const std::string& path, double t_a, double t_b, std::ostream& log, std::ostream& err) {
  TimeSeries series;
  try {
    series = read_series_csv(path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (series.empty()) {
    err << "error: '" << path << "' has no rows\n";
    return kFailure;
  }
  if (t_b < 0.0) t_b = series.back().t;
  const FitResult r = fit_series(series, t_a, t_b);
  if (r.peaks < 2) {
    err << "error: " << r.note << " in [" << t_a << ", " << t_b << "]\n";
    return kFailure;
  }
  log << "gamma " << detail::format_double(r.gamma) << "\n";
  log << "omega " << detail::format_double(r.omega) << "\n";
  log << "residual " << detail::format_double(r.residual) << "\n";
  log << "peaks " << r.peaks << "\n";
  return kOk;
}

/// Full command line dispatch.
inline int main(int argc, const char* const* argv, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Vlasov-Poisson solver based on hyperbolic moment equations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(HMEVP_VERSION));

  std::string config_path, out;
  bool force = false;
  int jobs = 1;

  auto* run_cmd = app.add_subcommand("run", "run one simulation; --key value overrides config entries");
  run_cmd->add_option("-c,--config", config_path, "config file (key = value)");
  run_cmd->add_option("-o,--out", out, "output directory")->required();
  run_cmd->add_flag("--force", force, "allow an existing output directory");
  run_cmd->allow_extras();

  auto* sweep_cmd = app.add_subcommand("sweep", "run every combination of sweep.N, sweep.M, sweep.cfl");
  sweep_cmd->add_option("-c,--config", config_path, "config file (key = value)");
  sweep_cmd->add_option("-o,--out", out, "output directory")->required();
  sweep_cmd->add_flag("--force", force, "allow an existing output directory");
  sweep_cmd->add_option("-j,--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);
  sweep_cmd->allow_extras();

  std::vector<int> orders{30, 90, 300};
  std::vector<double> dts{1.0};
  auto* vf_cmd = app.add_subcommand("validate-filter", "check the four filter conditions");
  vf_cmd->add_option("-c,--config", config_path, "config file (key = value)");
  vf_cmd->add_option("--orders", orders, "expansion orders M")->delimiter(',');
  vf_cmd->add_option("--dt", dts, "time steps for the quasi filter")->delimiter(',');
  vf_cmd->allow_extras();

  RecurrenceDemoOptions demo;
  auto* rd_cmd = app.add_subcommand("recurrence-demo", "free-streaming densities: exact, DVM, Hermite");
  rd_cmd->add_option("-o,--out", out, "output directory")->required();
  rd_cmd->add_flag("--force", force, "allow an existing output directory");
  rd_cmd->add_option("--amplitude", demo.amplitude, "perturbation amplitude A");
  rd_cmd->add_option("--k", demo.k, "wave number");
  rd_cmd->add_option("--dv", demo.dv, "DVM velocity spacing");
  rd_cmd->add_option("--M", demo.order, "Hermite order (M + 1 nodes)");
  rd_cmd->add_option("--x", demo.x, "evaluation point");
  rd_cmd->add_option("--t-end", demo.t_end, "final time");
  rd_cmd->add_option("--dt", demo.dt, "output spacing");

  std::string series_path;
  double t_a = 2.0, t_b = -1.0;
  auto* fit_cmd = app.add_subcommand("fit", "damping rate and frequency from series.csv");
  fit_cmd->add_option("series", series_path, "series.csv")->required();
  fit_cmd->add_option("--t-start", t_a, "fit window start");
  fit_cmd->add_option("--t-end", t_b, "fit window end (default: last sample)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, log, err) == 0 ? kOk : kUsage;
  }

  if (*run_cmd) return cmd_run(config_path, run_cmd->remaining(), out, force, log, err);
  if (*sweep_cmd) return cmd_sweep(config_path, sweep_cmd->remaining(), out, force, jobs, log, err);
  if (*vf_cmd) return cmd_validate_filter(config_path, vf_cmd->remaining(), orders, dts, log, err);
  if (*rd_cmd) return cmd_recurrence_demo(demo, out, force, log, err);
  if (*fit_cmd) return cmd_fit(series_path, t_a, t_b, log, err);
  return kUsage;
}

inline int main(const std::vector<std::string>& args, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  std::vector<const char*> argv;
  argv.push_back("hmevp");
  for (const auto& a : args) argv.push_back(a.c_str());
  return main(static_cast<int>(argv.size()), argv.data(), log, err);
}

}  // namespace hmevp::cli
