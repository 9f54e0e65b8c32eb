#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "hmevp/errors.hpp"
#include "hmevp/grid.hpp"
#include "hmevp/hermite.hpp"
#include "hmevp/moment_state.hpp"

namespace hmevp {

/// Largest zero of He_{M+1}; the extreme characteristic speed is u +- this * u_th.
inline double max_characteristic_zero(int order) { return HermiteTable::get(order + 1).max_zero(); }

/// Eigenvalues of the moment system's flux matrix along unit vector `normal`.
/// D = 1: u + C_k^{M+1} u_th for k = 0..M. D > 1: u.n + C_k^m u_th for all
/// zeros of He_m, 1 <= m <= M+1. Sorted ascending.
template <int D>
std::vector<double> characteristic_speeds(int order, const Basis<D>& basis, const std::array<double, D>& normal) {
  double un = 0.0;
  for (int d = 0; d < D; ++d) un += basis.u[d] * normal[d];
  std::vector<double> speeds;
  const int first = D == 1 ? order + 1 : 1;
  for (int m = first; m <= order + 1; ++m) {
    for (double z : HermiteTable::get(m).zeros) speeds.push_back(un + z * basis.uth);
  }
  std::sort(speeds.begin(), speeds.end());
  return speeds;
}

/// Expansion coefficients of v_j f in the state's own basis, with the
/// order-(M+1) contribution dropped:
///   g_alpha = u_th^2 f_{alpha-e_j} + u_j f_alpha + (alpha_j + 1) f_{alpha+e_j}.
template <int D>
void velocity_flux_coeffs(const MultiIndexSet<D>& idx, std::span<const double> f, const Basis<D>& basis, int dir,
                          std::span<double> g) {
  const double theta = basis.theta();
  const double u = basis.u[dir];
  for (std::size_t i = 0; i < idx.size(); ++i) {
    double acc = u * f[i];
    const std::size_t lo = idx.minus(i, dir);
    if (lo != MultiIndexSet<D>::npos) acc += theta * f[lo];
    const std::size_t hi = idx.plus(i, dir);
    if (hi != MultiIndexSet<D>::npos) acc += (idx[i][dir] + 1) * f[hi];
    g[i] = acc;
  }
}

/// Interface flux coefficients, tagged with the basis they are expanded in.
template <int D>
struct FluxCoeffs {
  Basis<D> basis;
  std::vector<double> coeffs;
};

template <int D>
FluxCoeffs<D> velocity_flux_coeffs(const MultiIndexSet<D>& idx, const MomentState<D>& state, int dir) {
  FluxCoeffs<D> out{state.basis, std::vector<double>(idx.size())};
  velocity_flux_coeffs<D>(idx, state.coeffs, state.basis, dir, out.coeffs);
  return out;
}

namespace detail {

template <int D>
struct HllScratch {
  std::vector<double> right;
  std::vector<double> flux_left;
  std::vector<double> flux_right;
  std::vector<double> rebase;

  void resize(std::size_t n) {
    right.resize(n);
    flux_left.resize(n);
    flux_right.resize(n);
    rebase.resize(n);
  }
};

// HLL flux in the left cell's basis, written to `out`.
template <int D>
void hll_flux_into(const MultiIndexSet<D>& idx, double c_max, const MomentState<D>& left, const MomentState<D>& right,
                   int dir, std::span<double> out, HllScratch<D>& s) {
  const std::size_t n = idx.size();
  const Basis<D>& bl = left.basis;
  const Basis<D>& br = right.basis;
  const double lambda_l = std::min(bl.u[dir] - c_max * bl.uth, br.u[dir] - c_max * br.uth);
  const double lambda_r = std::max(bl.u[dir] + c_max * bl.uth, br.u[dir] + c_max * br.uth);

  if (lambda_l >= 0.0 || (br == bl && right.coeffs == left.coeffs)) {
    velocity_flux_coeffs<D>(idx, left.coeffs, bl, dir, out);
    return;
  }
  if (br == bl) {
    std::copy(right.coeffs.begin(), right.coeffs.end(), s.right.begin());
  } else {
    rebase_coeffs<D>(idx, right.coeffs, br, bl, s.right, s.rebase);
  }
  if (lambda_r <= 0.0) {
    velocity_flux_coeffs<D>(idx, s.right, bl, dir, out);
    return;
  }
  velocity_flux_coeffs<D>(idx, left.coeffs, bl, dir, s.flux_left);
  velocity_flux_coeffs<D>(idx, s.right, bl, dir, s.flux_right);
  const double inv = 1.0 / (lambda_r - lambda_l);
  const double prod = lambda_l * lambda_r;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = (lambda_r * s.flux_left[i] - lambda_l * s.flux_right[i] + prod * (s.right[i] - left.coeffs[i])) * inv;
  }
}

}  // namespace detail

/// HLL numerical flux between `left` and `right` along direction `dir`. The
/// right state is re-expanded onto the left basis; wave speeds are the extreme
/// characteristic speeds over both cells.
template <int D>
FluxCoeffs<D> hll_flux(const MultiIndexSet<D>& idx, const MomentState<D>& left, const MomentState<D>& right, int dir) {
  detail::HllScratch<D> scratch;
  scratch.resize(idx.size());
  FluxCoeffs<D> out{left.basis, std::vector<double>(idx.size())};
  detail::hll_flux_into<D>(idx, max_characteristic_zero(idx.order()), left, right, dir, out.coeffs, scratch);
  return out;
}

/// Increments to the order-M coefficients of cell c from the regularization
/// term along direction `dir`, using central differences of the neighbors'
/// macroscopic velocity and thermal velocity:
///   K2_alpha = (dt / 2dx) (alpha_dir + 1) sum_d [ f_{alpha-e_d+e_dir} (u_{d,+} - u_{d,-})
///                                              + f_{alpha-2e_d+e_dir} u_th (u_th,+ - u_th,-) ]
/// `out` has one entry per multi-index; entries below order M are left zero.
template <int D>
void regularization_correction(const Grid<D>& grid, double dt, std::size_t c, int dir, std::span<double> out) {
  const auto& idx = grid.index;
  const int order = idx.order();
  std::fill(out.begin(), out.end(), 0.0);
  const auto& cell = grid.cells[c];
  const auto& plus = grid.cells[grid.neighbor(c, dir, +1)];
  const auto& minus = grid.cells[grid.neighbor(c, dir, -1)];
  const double duth = plus.basis.uth - minus.basis.uth;
  std::array<double, D> du{};
  for (int d = 0; d < D; ++d) du[d] = plus.basis.u[d] - minus.basis.u[d];
  const double factor = dt / (2.0 * grid.dx[dir]);

  for (std::size_t i = idx.grade_begin(order); i < idx.grade_end(order); ++i) {
    const auto alpha = idx[i];
    double acc = 0.0;
    for (int d = 0; d < D; ++d) {
      auto a1 = alpha;
      a1[d] -= 1;
      a1[dir] += 1;
      const std::size_t k1 = idx.index_of(a1);
      if (k1 != MultiIndexSet<D>::npos) acc += cell.coeffs[k1] * du[d];
      auto a2 = alpha;
      a2[d] -= 2;
      a2[dir] += 1;
      const std::size_t k2 = idx.index_of(a2);
      if (k2 != MultiIndexSet<D>::npos) acc += cell.coeffs[k2] * cell.basis.uth * duth;
    }
    out[i] = factor * (alpha[dir] + 1) * acc;
  }
}

/// Reusable buffers for convection_step.
template <int D>
struct ConvectionWorkspace {
  std::array<std::vector<double>, D> flux;  // flux[d][c*K..]: interface c+1/2 along d, in cell c's basis
  std::vector<MomentState<D>> next;
  std::vector<double> update;
  std::vector<double> shifted;
  std::vector<double> k2;
  std::vector<double> scratch;
  detail::HllScratch<D> hll;

  void prepare(const Grid<D>& grid) {
    const std::size_t k = grid.index.size();
    for (int d = 0; d < D; ++d) flux[d].resize(grid.size() * k);
    next = grid.cells;
    update.resize(k);
    shifted.resize(k);
    k2.resize(k);
    scratch.resize(k);
    hll.resize(k);
  }
};

/// One explicit convection update of every cell: conservative HLL flux
/// differencing, the regularization correction on order-M coefficients, then
/// constraint enforcement. In 2D both directions are differenced in a single
/// unsplit update. Throws RealizabilityError (with the cell index) when a cell
/// loses positive temperature or density; the grid is left unchanged then.
template <int D>
void convection_step(Grid<D>& grid, double dt, ConvectionWorkspace<D>& ws) {
  const auto& idx = grid.index;
  const std::size_t k = idx.size();
  const double c_max = max_characteristic_zero(idx.order());
  if (ws.next.size() != grid.size() || ws.update.size() != k) ws.prepare(grid);

  for (int d = 0; d < D; ++d) {
    for (std::size_t c = 0; c < grid.size(); ++c) {
      const std::size_t r = grid.neighbor(c, d, +1);
      detail::hll_flux_into<D>(idx, c_max, grid.cells[c], grid.cells[r], d,
                               std::span<double>(ws.flux[d].data() + c * k, k), ws.hll);
    }
  }

  for (std::size_t c = 0; c < grid.size(); ++c) {
    const auto& cell = grid.cells[c];
    std::copy(cell.coeffs.begin(), cell.coeffs.end(), ws.update.begin());
    for (int d = 0; d < D; ++d) {
      const double ratio = dt / grid.dx[d];
      const std::size_t l = grid.neighbor(c, d, -1);
      const std::span<const double> f_right(ws.flux[d].data() + c * k, k);
      const std::span<const double> f_left(ws.flux[d].data() + l * k, k);
      const auto& bl = grid.cells[l].basis;
      if (bl == cell.basis) {
        std::copy(f_left.begin(), f_left.end(), ws.shifted.begin());
      } else {
        rebase_coeffs<D>(idx, f_left, bl, cell.basis, ws.shifted, ws.scratch);
      }
      for (std::size_t i = 0; i < k; ++i) ws.update[i] -= ratio * (f_right[i] - ws.shifted[i]);

      regularization_correction<D>(grid, dt, c, d, ws.k2);
      for (std::size_t i = idx.grade_begin(idx.order()); i < k; ++i) ws.update[i] += ws.k2[i];
    }

    auto& out = ws.next[c];
    out.coeffs.assign(ws.update.begin(), ws.update.end());
    try {
      out.basis = enforce_constraints_inplace<D>(idx, out.coeffs, cell.basis, ws.scratch);
    } catch (const RealizabilityError& e) {
      throw RealizabilityError(std::string("convection step: ") + e.what(), static_cast<std::ptrdiff_t>(c));
    }
  }
  grid.cells.swap(ws.next);
}

template <int D>
Grid<D> convection_step(const Grid<D>& grid, double dt) {
  Grid<D> out = grid;
  ConvectionWorkspace<D> ws;
  ws.prepare(out);
  convection_step<D>(out, dt, ws);
  return out;
}

/// Force substep: every cell's center moves by dt * E; coefficients and the
/// thermal velocity are untouched.
template <int D>
void acceleration_step(Grid<D>& grid, const std::array<std::vector<double>, D>& field, double dt) {
  for (std::size_t c = 0; c < grid.size(); ++c) {
    for (int d = 0; d < D; ++d) grid.cells[c].basis.u[d] += dt * field[d][c];
  }
}

/// dt = CFL * min_d dx_d / max_cells(|u| + C_0^{M+1} u_th).
template <int D>
double cfl_timestep(const Grid<D>& grid, double cfl) {
  const double c_max = max_characteristic_zero(grid.order());
  double lambda = 0.0;
  for (const auto& cell : grid.cells) {
    double speed2 = 0.0;
    for (int d = 0; d < D; ++d) speed2 += cell.basis.u[d] * cell.basis.u[d];
    lambda = std::max(lambda, std::sqrt(speed2) + c_max * cell.basis.uth);
  }
  double h = grid.dx[0];
  for (int d = 1; d < D; ++d) h = std::min(h, grid.dx[d]);
  return cfl * h / lambda;
}

}  // namespace hmevp
