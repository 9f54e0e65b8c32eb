#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "hmevp/config.hpp"
#include "hmevp/diagnostics.hpp"
#include "hmevp/errors.hpp"
#include "hmevp/filter.hpp"
#include "hmevp/grid.hpp"
#include "hmevp/hermite.hpp"
#include "hmevp/hme_solver.hpp"
#include "hmevp/moment_state.hpp"
#include "hmevp/poisson.hpp"
#include "hmevp/reference_kinetics.hpp"
#include "hmevp/run_record.hpp"

namespace hmevp {

/// rho = rho0 + A cos(k x) at cell centers, unit Maxwellian in v.
inline Grid<1> init_landau_1d(const SimConfig& config) {
  Grid<1> grid(config.order, {config.nx}, {config.lengths()[0]});
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const double x = grid.center(c)[0];
    grid.cells[c].coeffs[0] = config.rho0 + config.amplitude * std::cos(config.k * x);
  }
  return grid;
}

/// rho = rho0 + A cos(k_x x) cos(k_y y) on the square [0, 4 pi / k_x]^2.
inline Grid<2> init_landau_2d(const SimConfig& config) {
  const auto len = config.lengths();
  Grid<2> grid(config.order, {config.nx, config.ny}, {len[0], len[1]});
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const auto x = grid.center(c);
    grid.cells[c].coeffs[0] =
        config.rho0 + config.amplitude * std::cos(config.k * x[0]) * std::cos(config.ky * x[1]);
  }
  return grid;
}

/// Hermite coefficients about (0, u_th) of the unit-mass symmetric pair of
/// Maxwellians centered at +-u0 with thermal velocity uth0, by Gauss-Hermite
/// quadrature of f_n = u_th^n / n! int f He_n(v / u_th) dv with 4(M+1) nodes.
inline std::vector<double> two_stream_profile(int order, double u0, double uth0, double uth) {
  const auto& table = HermiteTable::get(4 * (order + 1));
  std::vector<double> f(order + 1, 0.0);
  std::vector<double> he(order + 1);
  for (double sign : {-1.0, 1.0}) {
    for (std::size_t q = 0; q < table.zeros.size(); ++q) {
      const double v = sign * u0 + uth0 * table.zeros[q];
      hermite_eval_all(order, v / uth, he.data());
      const double w = 0.5 * table.weights[q];
      for (int n = 0; n <= order; ++n) f[n] += w * he[n];
    }
  }
  double scale = 1.0;
  for (int n = 0; n <= order; ++n) {
    f[n] *= scale;
    scale *= uth / (n + 1);
  }
  return f;
}

/// Two counter-streaming Maxwellians with density rho0 + eps cos(kx), expanded
/// about u = 0, u_th = sqrt(u0^2 + uth0^2). Raw moments m_0..m_4 of every cell
/// are checked against the mixture formulas.
inline Grid<1> init_two_stream(const SimConfig& config) {
  const double uth = std::sqrt(config.u0 * config.u0 + config.uth0 * config.uth0);
  Grid<1> grid(config.order, {config.nx}, {config.lengths()[0]});
  const auto profile = two_stream_profile(config.order, config.u0, config.uth0, uth);

  const double u2 = config.u0 * config.u0;
  const double s2 = config.uth0 * config.uth0;
  const std::array<double, 5> expected{1.0, 0.0, u2 + s2, 0.0, 3.0 * s2 * s2 + 6.0 * u2 * s2 + u2 * u2};
  MomentState<1> unit;
  unit.basis.uth = uth;
  unit.coeffs = profile;
  const int check = std::min(4, config.order);
  const auto m = raw_moments<1>(grid.index, unit, check);
  for (int n = 0; n <= check; ++n) {
    const double scale = std::max(1.0, std::abs(expected[n]));
    if (std::abs(m[n] - expected[n]) > 1e-10 * scale) {
      std::ostringstream msg;
      msg << "two-stream projection: moment " << n << " is " << m[n] << ", expected " << expected[n];
      throw NumericalError(msg.str());
    }
  }

  for (std::size_t c = 0; c < grid.size(); ++c) {
    const double rho = config.rho0 + config.amplitude * std::cos(config.k * grid.center(c)[0]);
    auto& cell = grid.cells[c];
    cell.basis.uth = uth;
    for (int n = 0; n <= config.order; ++n) cell.coeffs[n] = rho * profile[n];
  }
  return grid;
}

/// Per-grade sqrt(sum_cells sum_{|alpha| = n} f_alpha^2 dV).
template <int D>
std::vector<double> coefficient_spectrum(const Grid<D>& grid) {
  std::vector<double> out(grid.order() + 1, 0.0);
  for (const auto& cell : grid.cells) {
    for (int g = 0; g <= grid.order(); ++g) {
      for (std::size_t i = grid.index.grade_begin(g); i < grid.index.grade_end(g); ++i) {
        out[g] += cell.coeffs[i] * cell.coeffs[i];
      }
    }
  }
  for (double& x : out) x = std::sqrt(x * grid.cell_volume());
  return out;
}

/// Time loop state: the grid, its electric field and the clock.
template <int D>
class Simulation {
 public:
  Simulation(const SimConfig& config, Grid<D> grid)
      : config_(config),
        grid_(std::move(grid)),
        poisson_(grid_.n, grid_.dx),
        phi_(grid_.size(), 0.0),
        field_on_(config.preset != Preset::free_stream) {
    for (int d = 0; d < D; ++d) field_[d].assign(grid_.size(), 0.0);
    workspace_.prepare(grid_);
    solve_field();
  }

  double time() const { return t_; }
  long steps() const { return steps_; }
  const Grid<D>& grid() const { return grid_; }
  const std::array<std::vector<double>, D>& field() const { return field_; }
  const SimConfig& config() const { return config_; }

  SeriesRow sample() const { return sample_diagnostics<D>(grid_, field_, t_); }

  /// CFL step length, clamped so the clock does not pass t_end.
  double next_timestep() const {
    const double dt = cfl_timestep<D>(grid_, config_.cfl);
    return std::min(dt, config_.t_end - t_);
  }

  /// convection -> field solve on the convected density -> acceleration ->
  /// filter with this step's dt. Returns the dt taken.
  double step() { return step(next_timestep()); }

  double step(double dt) {
    try {
      convection_step<D>(grid_, dt, workspace_);
    } catch (const RealizabilityError& e) {
      throw RealizabilityError(e.what(), e.cell(), t_ + dt);
    }
    solve_field();
    if (field_on_) acceleration_step<D>(grid_, field_, dt);
    if (config_.filter.kind != FilterKind::none) {
      const auto sigma = filter_factors_by_grade(config_.filter, grid_.order(), dt);
      for (auto& cell : grid_.cells) apply_filter_inplace<D>(grid_.index, cell.coeffs, sigma);
    }
    t_ = t_ + dt >= config_.t_end ? config_.t_end : t_ + dt;
    ++steps_;
    return dt;
  }

  /// Steps until t_end. Diagnostics are sampled every sample_stride steps and
  /// at the final time; a failing step ends the record early.
  RunRecord run() {
    const auto start = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.dim = D;
    rec.config_echo = to_text(config_);
    std::vector<double> pending = config_.spectrum_times;
    std::sort(pending.begin(), pending.end());
    std::size_t next_spectrum = 0;
    auto take_spectra = [&] {
      while (next_spectrum < pending.size() && pending[next_spectrum] <= t_) {
        rec.spectra.push_back({t_, coefficient_spectrum<D>(grid_)});
        ++next_spectrum;
      }
    };
    rec.series.push_back(sample());
    take_spectra();
    try {
      while (t_ < config_.t_end) {
        step();
        const bool last = t_ >= config_.t_end;
        if (steps_ % config_.sample_stride == 0 || last) rec.series.push_back(sample());
        take_spectra();
      }
    } catch (const RealizabilityError& e) {
      rec.failed = true;
      rec.failure = e.what();
      rec.failure_cell = e.cell();
      rec.failure_time = e.time();
    } catch (const NumericalError& e) {
      rec.failed = true;
      rec.failure = e.what();
      rec.failure_time = t_;
    }
    rec.steps = steps_;
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
  }

 private:
  void solve_field() {
    if (!field_on_) return;
    const auto rho = grid_.density();
    poisson_.solve(rho, config_.rho0, phi_);
    electric_field<D>(phi_, grid_.n, grid_.dx, field_);
  }

  SimConfig config_;
  Grid<D> grid_;
  PoissonSolver<D> poisson_;
  std::vector<double> phi_;
  std::array<std::vector<double>, D> field_;
  ConvectionWorkspace<D> workspace_;
  bool field_on_ = true;
  double t_ = 0.0;
  long steps_ = 0;
};

inline Grid<1> init_grid_1d(const SimConfig& config) {
  switch (config.preset) {
    case Preset::two_stream: return init_two_stream(config);
    case Preset::landau_1d:
    case Preset::free_stream: return init_landau_1d(config);
    case Preset::landau_2d: break;
  }
  throw ConfigError("preset landau_2d is two-dimensional");
}

/// Runs the configured preset with the configured solver.
inline RunRecord run(const SimConfig& config) {
  config.validate();
  if (config.solver == SolverKind::dvm) return dvm_vlasov_run(config);
  if (config.dim() == 2) {
    Simulation<2> sim(config, init_landau_2d(config));
    return sim.run();
  }
  Simulation<1> sim(config, init_grid_1d(config));
  return sim.run();
}

}  // namespace hmevp
