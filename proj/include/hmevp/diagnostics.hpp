#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "hmevp/grid.hpp"

namespace hmevp {

/// One diagnostic sample. momentum_y and energy_single_temp are only
/// meaningful for 2D runs (the latter is the rho|u|^2 + rho u_th^2 form
/// without the dimension factor).
struct SeriesRow {
  double t = 0.0;
  double field = 0.0;  // sqrt(int |E|^2 dx)
  double mass = 0.0;
  double momentum = 0.0;
  double energy = 0.0;
  double momentum_y = 0.0;
  double energy_single_temp = 0.0;
};

using TimeSeries = std::vector<SeriesRow>;

/// sqrt(sum_cells |E|^2 dV).
template <int D>
double electric_energy(const std::array<std::vector<double>, D>& field, double cell_volume) {
  double sum = 0.0;
  for (int d = 0; d < D; ++d) {
    for (double e : field[d]) sum += e * e;
  }
  return std::sqrt(sum * cell_volume);
}

/// sum_cells (|E|^2 + rho |u|^2 + D rho u_th^2) dV
template <int D>
double total_energy(const Grid<D>& grid, const std::array<std::vector<double>, D>& field) {
  double sum = 0.0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const auto& cell = grid.cells[c];
    const double rho = cell.coeffs[0];
    double u2 = 0.0;
    double e2 = 0.0;
    for (int d = 0; d < D; ++d) {
      u2 += cell.basis.u[d] * cell.basis.u[d];
      if (!field[d].empty()) e2 += field[d][c] * field[d][c];
    }
    sum += e2 + rho * u2 + D * rho * cell.basis.theta();
  }
  return sum * grid.cell_volume();
}

/// Mass, momentum, energies and field norm of a grid state at time t.
template <int D>
SeriesRow sample_diagnostics(const Grid<D>& grid, const std::array<std::vector<double>, D>& field, double t) {
  SeriesRow row;
  row.t = t;
  const double dv = grid.cell_volume();
  row.field = electric_energy<D>(field, dv);
  double e2 = 0.0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const auto& cell = grid.cells[c];
    const double rho = cell.coeffs[0];
    row.mass += rho;
    row.momentum += rho * cell.basis.u[0];
    if constexpr (D == 2) row.momentum_y += rho * cell.basis.u[1];
    double u2 = 0.0;
    for (int d = 0; d < D; ++d) {
      u2 += cell.basis.u[d] * cell.basis.u[d];
      if (!field[d].empty()) e2 += field[d][c] * field[d][c];
    }
    row.energy_single_temp += rho * u2 + rho * cell.basis.theta();
  }
  row.mass *= dv;
  row.momentum *= dv;
  row.momentum_y *= dv;
  row.energy = total_energy<D>(grid, field);
  row.energy_single_temp = (row.energy_single_temp + e2) * dv;
  return row;
}

struct Peak {
  double t;
  double value;
};

struct PeakList {
  std::vector<Peak> peaks;
  double threshold = 0.0;
};

/// Strict local maxima y[i-1] < y[i] > y[i+1], refined by the vertex of the
/// parabola through the three samples. Maxima at or below `threshold` are dropped.
inline PeakList find_peaks(const std::vector<double>& t, const std::vector<double>& y, double threshold = 0.0) {
  if (t.size() != y.size()) throw std::invalid_argument("find_peaks: size mismatch");
  PeakList out;
  out.threshold = threshold;
  if (t.size() < 3) return out;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    if (!(y[i - 1] < y[i] && y[i] > y[i + 1])) continue;
    if (y[i] <= threshold) continue;
    const double t0 = t[i - 1], t1 = t[i], t2 = t[i + 1];
    const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
    // Divided differences of the interpolating parabola.
    const double d01 = (y1 - y0) / (t1 - t0);
    const double d12 = (y2 - y1) / (t2 - t1);
    const double a = (d12 - d01) / (t2 - t0);
    Peak p{t1, y1};
    if (a < 0.0) {
      const double b = d01 - a * (t0 + t1);
      const double tv = -b / (2.0 * a);
      if (tv > t0 && tv < t2) {
        p.t = tv;
        p.value = y0 + d01 * (tv - t0) + a * (tv - t0) * (tv - t1);
      }
    }
    out.peaks.push_back(p);
  }
  return out;
}

/// Peaks of the field norm; samples below 1e3 machine epsilons of the initial
/// value are treated as noise floor.
inline PeakList find_peaks(const TimeSeries& series) {
  if (series.size() < 3) throw std::invalid_argument("find_peaks: need at least 3 samples");
  std::vector<double> t(series.size()), y(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    t[i] = series[i].t;
    y[i] = series[i].field;
  }
  return find_peaks(t, y, 1e3 * std::numeric_limits<double>::epsilon() * series.front().field);
}

inline PeakList peaks_in_window(const PeakList& peaks, double t_a, double t_b) {
  PeakList out;
  out.threshold = peaks.threshold;
  for (const auto& p : peaks.peaks) {
    if (p.t >= t_a && p.t <= t_b) out.peaks.push_back(p);
  }
  return out;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the fit residuals
  std::size_t count = 0;
};

inline LinearFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("least_squares_line: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares_line: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.count = n;
  return fit;
}

/// Least-squares line through (t_i, ln E_i) for the peaks in [t_a, t_b];
/// the slope is the damping (or growth) rate.
inline LinearFit fit_damping_rate(const PeakList& peaks, double t_a, double t_b) {
  const PeakList w = peaks_in_window(peaks, t_a, t_b);
  if (w.peaks.size() < 2) throw std::domain_error("fit_damping_rate: fewer than two peaks in the window");
  std::vector<double> t, y;
  for (const auto& p : w.peaks) {
    t.push_back(p.t);
    y.push_back(std::log(p.value));
  }
  return least_squares_line(t, y);
}

/// The field norm oscillates at twice the wave frequency, so consecutive
/// peaks are pi / omega_R apart.
inline double estimate_frequency(const PeakList& peaks) {
  if (peaks.peaks.size() < 2) throw std::domain_error("estimate_frequency: fewer than two peaks");
  const double span = peaks.peaks.back().t - peaks.peaks.front().t;
  const double spacing = span / static_cast<double>(peaks.peaks.size() - 1);
  return std::numbers::pi / spacing;
}

/// Least-squares slope of ln E over all samples in [t_a, t_b] (monotone growth phases).
inline LinearFit fit_growth_rate(const TimeSeries& series, double t_a, double t_b) {
  std::vector<double> t, y;
  for (const auto& row : series) {
    if (row.t >= t_a && row.t <= t_b && row.field > 0.0) {
      t.push_back(row.t);
      y.push_back(std::log(row.field));
    }
  }
  return least_squares_line(t, y);
}

/// (pi / k) sqrt(M), the recurrence-time estimate for a Hermite discretization.
inline double recurrence_time_estimate(int order, double k) {
  if (order < 1 || !(k > 0.0)) throw std::invalid_argument("recurrence_time_estimate: need M >= 1, k > 0");
  return std::numbers::pi / k * std::sqrt(static_cast<double>(order));
}

/// 2 pi / (k dv), the exact recurrence period of an equidistant velocity grid.
inline double dvm_recurrence_time(double k, double dv) { return 2.0 * std::numbers::pi / (k * dv); }

}  // namespace hmevp
