#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "hmevp/config.hpp"
#include "hmevp/diagnostics.hpp"
#include "hmevp/errors.hpp"
#include "hmevp/hermite.hpp"
#include "hmevp/poisson.hpp"
#include "hmevp/run_record.hpp"

namespace hmevp {

/// Density of the free-streaming solution from a Maxwellian with a cosine
/// perturbation: 1 + A cos(kx) exp(-k^2 t^2 / 2).
inline double exact_free_streaming_density(double x, double t, double amplitude, double k) {
  return 1.0 + amplitude * std::cos(k * x) * std::exp(-0.5 * k * k * t * t);
}

/// Rectangle-rule density on the equidistant velocity grid v_j = j dv, |j| <= J.
/// Periodic in t with period 2 pi / (k dv).
inline double dvm_density(double x, double t, double amplitude, double k, double dv, int half_width) {
  const double norm = dv / std::sqrt(2.0 * std::numbers::pi);
  double sum = 0.0;
  // Pair +-j so the sum is symmetric in v.
  for (int j = half_width; j >= 1; --j) {
    const double v = j * dv;
    const double w = std::exp(-0.5 * v * v);
    sum += w * (2.0 + amplitude * (std::cos(k * (x - v * t)) + std::cos(k * (x + v * t))));
  }
  sum += 1.0 + amplitude * std::cos(k * x);
  return norm * sum;
}

/// Smallest J with exp(-(J dv)^2 / 2) < 1e-16.
inline int dvm_half_width(double dv) {
  return static_cast<int>(std::ceil(std::sqrt(2.0 * 16.0 * std::log(10.0)) / dv)) + 1;
}

/// Density of the free-streaming solution when velocity is collocated at the
/// M + 1 zeros of He_{M+1}: sum_j w_j (1 + A cos(k(x - v_j t))).
inline double hermite_collocation_density(double x, double t, double amplitude, double k, int order) {
  if (order < 1) throw std::invalid_argument("hermite_collocation_density: M must be >= 1");
  const auto& table = HermiteTable::get(order + 1);
  double sum = 0.0;
  for (std::size_t j = 0; j < table.zeros.size(); ++j) {
    sum += table.weights[j] * (1.0 + amplitude * std::cos(k * (x - table.zeros[j] * t)));
  }
  return sum;
}

/// Discrete-velocity state on a periodic x grid: f[i * nv + j] at x_i = (i + 1/2) dx,
/// v_j = (j - J) dv.
struct DvmState {
  int nx = 0;
  int half_width = 0;
  double dx = 0.0;
  double dv = 0.0;
  std::vector<double> f;

  int nv() const { return 2 * half_width + 1; }
  double velocity(int j) const { return (j - half_width) * dv; }
  double position(int i) const { return (i + 0.5) * dx; }

  std::vector<double> density() const {
    std::vector<double> rho(nx, 0.0);
    for (int i = 0; i < nx; ++i) {
      double acc = 0.0;
      for (int j = 0; j < nv(); ++j) acc += f[static_cast<std::size_t>(i) * nv() + j];
      rho[i] = acc * dv;
    }
    return rho;
  }
};

/// Initial DVM state for a 1D preset. The velocity grid spans [-v_max, v_max].
inline DvmState dvm_initial_state(const SimConfig& config) {
  if (config.dim() != 1) throw ConfigError("discrete-velocity solver supports 1D presets only");
  DvmState s;
  s.nx = config.nx;
  s.dx = config.lengths()[0] / config.nx;
  s.dv = config.dvm_dv;
  s.half_width = static_cast<int>(std::ceil(config.dvm_velocity_bound() / config.dvm_dv));
  s.f.assign(static_cast<std::size_t>(s.nx) * s.nv(), 0.0);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (int i = 0; i < s.nx; ++i) {
    const double rho = config.rho0 + config.amplitude * std::cos(config.k * s.position(i));
    for (int j = 0; j < s.nv(); ++j) {
      const double v = s.velocity(j);
      double g = 0.0;
      if (config.preset == Preset::two_stream) {
        const double a = (v - config.u0) / config.uth0;
        const double b = (v + config.u0) / config.uth0;
        g = 0.5 * inv_sqrt_2pi / config.uth0 * (std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b));
      } else {
        g = inv_sqrt_2pi * std::exp(-0.5 * v * v);
      }
      s.f[static_cast<std::size_t>(i) * s.nv() + j] = rho * g;
    }
  }
  return s;
}

namespace detail {

inline SeriesRow dvm_sample(const DvmState& s, const std::vector<double>& e, double t) {
  SeriesRow row;
  row.t = t;
  double e2 = 0.0;
  for (int i = 0; i < s.nx; ++i) {
    const double* fi = s.f.data() + static_cast<std::size_t>(i) * s.nv();
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (int j = 0; j < s.nv(); ++j) {
      const double v = s.velocity(j);
      m0 += fi[j];
      m1 += v * fi[j];
      m2 += v * v * fi[j];
    }
    row.mass += m0 * s.dv;
    row.momentum += m1 * s.dv;
    row.energy += m2 * s.dv + e[i] * e[i];
    e2 += e[i] * e[i];
  }
  row.mass *= s.dx;
  row.momentum *= s.dx;
  row.energy *= s.dx;
  row.energy_single_temp = row.energy;
  row.field = std::sqrt(e2 * s.dx);
  return row;
}

}  // namespace detail

/// Independent reference solver: first-order upwind transport in x, the same
/// periodic Poisson solve on the transported density, first-order upwind
/// acceleration in v with no flux through +-v_max (mass is conserved). dt = CFL dx / v_max; a step
/// whose v-direction Courant number exceeds one aborts the run.
inline RunRecord dvm_vlasov_run(const SimConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.dim = 1;
  rec.config_echo = to_text(config);

  DvmState s = dvm_initial_state(config);
  const int nx = s.nx;
  const int nv = s.nv();
  const bool field_on = config.preset != Preset::free_stream;
  PoissonSolver<1> poisson({nx}, {s.dx});
  std::vector<double> phi(nx, 0.0);
  std::array<std::vector<double>, 1> e{std::vector<double>(nx, 0.0)};
  auto solve_field = [&] {
    if (!field_on) return;
    const auto rho = s.density();
    poisson.solve(rho, config.rho0, phi);
    electric_field<1>(phi, {nx}, {s.dx}, e);
  };
  solve_field();

  const double v_max = s.half_width * s.dv;
  const double dt_cfl = config.cfl * s.dx / v_max;
  double t = 0.0;
  long step = 0;
  rec.series.push_back(detail::dvm_sample(s, e[0], t));
  std::vector<double> next(s.f.size());
  std::vector<double> column(nv);

  while (t < config.t_end) {
    double dt = dt_cfl;
    bool last = false;
    if (t + dt >= config.t_end) {
      dt = config.t_end - t;
      last = true;
    }
    // x transport
    for (int j = 0; j < nv; ++j) {
      const double nu = s.velocity(j) * dt / s.dx;
      for (int i = 0; i < nx; ++i) {
        const int im = (i + nx - 1) % nx;
        const int ip = (i + 1) % nx;
        const double fi = s.f[static_cast<std::size_t>(i) * nv + j];
        const double diff = nu > 0.0 ? fi - s.f[static_cast<std::size_t>(im) * nv + j]
                                     : s.f[static_cast<std::size_t>(ip) * nv + j] - fi;
        next[static_cast<std::size_t>(i) * nv + j] = fi - nu * diff;
      }
    }
    s.f.swap(next);
    solve_field();
    // v acceleration
    if (field_on) {
      for (int i = 0; i < nx; ++i) {
        const double nu = e[0][i] * dt / s.dv;
        if (std::abs(nu) > 1.0) {
          std::ostringstream msg;
          msg << "dvm: v-direction CFL violated (|E| dt / dv = " << std::abs(nu) << ") at t = " << t;
          throw NumericalError(msg.str());
        }
        double* fi = s.f.data() + static_cast<std::size_t>(i) * nv;
        // Upwind fluxes between velocity cells; none through +-v_max.
        for (int j = 0; j + 1 < nv; ++j) column[j] = nu * (nu > 0.0 ? fi[j] : fi[j + 1]);
        double below = 0.0;
        for (int j = 0; j < nv; ++j) {
          const double above = j + 1 < nv ? column[j] : 0.0;
          fi[j] -= above - below;
          below = above;
        }
      }
    }
    t = last ? config.t_end : t + dt;
    ++step;
    if (step % config.sample_stride == 0 || last) rec.series.push_back(detail::dvm_sample(s, e[0], t));
  }
  rec.steps = step;
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace hmevp
