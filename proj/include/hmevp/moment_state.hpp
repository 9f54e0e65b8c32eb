#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "hmevp/errors.hpp"
#include "hmevp/hermite.hpp"
#include "hmevp/multi_index.hpp"

namespace hmevp {

/// Expansion center of the generalized Hermite basis: macroscopic velocity u
/// and thermal velocity u_th.
template <int D>
struct Basis {
  std::array<double, D> u{};
  double uth = 1.0;

  double theta() const { return uth * uth; }
  bool operator==(const Basis&) const = default;
};

/// Local velocity distribution of one cell,
///   f(v) = sum_{|alpha| <= M} f_alpha H_alpha^{[u, u_th]}(v),
/// with H_alpha = (-1)^|alpha| d^alpha omega and omega the Gaussian centered
/// at u with variance u_th^2 per direction. coeffs is laid out over
/// MultiIndexSet<D>(M); coeffs[0] is the density.
template <int D>
struct MomentState {
  Basis<D> basis;
  std::vector<double> coeffs;

  double rho() const { return coeffs.at(0); }
};

template <int D>
MomentState<D> maxwellian_state(const MultiIndexSet<D>& idx, double rho, const std::array<double, D>& u,
                                double uth) {
  MomentState<D> s;
  s.basis.u = u;
  s.basis.uth = uth;
  s.coeffs.assign(idx.size(), 0.0);
  s.coeffs[0] = rho;
  return s;
}

/// f(v) for the given state.
template <int D>
double evaluate_distribution(const MultiIndexSet<D>& idx, const MomentState<D>& state,
                             const std::array<double, D>& v) {
  const int order = idx.order();
  const double s = state.basis.uth;
  std::array<std::vector<double>, D> he;
  double weight = 1.0;
  for (int d = 0; d < D; ++d) {
    const double x = (v[d] - state.basis.u[d]) / s;
    he[d].resize(order + 1);
    hermite_eval_all(order, x, he[d].data());
    // Fold the u_th^{-n} factor into the table.
    double scale = 1.0;
    for (int n = 0; n <= order; ++n) {
      he[d][n] *= scale;
      scale /= s;
    }
    weight *= std::exp(-0.5 * x * x) / (std::sqrt(2.0 * std::numbers::pi) * s);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    double term = state.coeffs[i];
    for (int d = 0; d < D; ++d) term *= he[d][idx[i][d]];
    sum += term;
  }
  return sum * weight;
}

namespace detail {

// E[(u + s Z)^j] for Z standard normal, j = 0..order.
inline std::vector<double> gaussian_raw_moments(double u, double s, int order) {
  std::vector<double> central(order + 1, 0.0);  // E[Z^i]
  central[0] = 1.0;
  for (int i = 2; i <= order; i += 2) central[i] = central[i - 2] * (i - 1);
  std::vector<double> out(order + 1, 0.0);
  for (int j = 0; j <= order; ++j) {
    double binom = 1.0;
    double acc = 0.0;
    for (int i = 0; i <= j; ++i) {
      if (i % 2 == 0) acc += binom * std::pow(u, j - i) * std::pow(s, i) * central[i];
      binom = binom * (j - i) / (i + 1);
    }
    out[j] = acc;
  }
  return out;
}

}  // namespace detail

/// Raw velocity moments m_beta = int v^beta f dv for |beta| <= order, laid out
/// over MultiIndexSet<D>(order). Uses int v^k H_n dv = k!/(k-n)! int v^{k-n} omega dv,
/// so m_beta only reads coefficients with alpha <= beta componentwise.
template <int D>
std::vector<double> raw_moments(const MultiIndexSet<D>& idx, const MomentState<D>& state, int order) {
  if (order > idx.order()) throw std::invalid_argument("raw_moments: order exceeds expansion order");
  const MultiIndexSet<D> out_idx(order);
  // table[d][b][a] = b!/(b-a)! * E[v_d^{b-a}] under the basis Gaussian.
  std::array<std::vector<std::vector<double>>, D> table;
  for (int d = 0; d < D; ++d) {
    const auto mu = detail::gaussian_raw_moments(state.basis.u[d], state.basis.uth, order);
    table[d].assign(order + 1, std::vector<double>(order + 1, 0.0));
    for (int b = 0; b <= order; ++b) {
      double falling = 1.0;
      for (int a = 0; a <= b; ++a) {
        table[d][b][a] = falling * mu[b - a];
        falling *= (b - a);
      }
    }
  }
  std::vector<double> m(out_idx.size(), 0.0);
  for (std::size_t bi = 0; bi < out_idx.size(); ++bi) {
    const auto& beta = out_idx[bi];
    double acc = 0.0;
    for (std::size_t ai = 0; ai < idx.size(); ++ai) {
      const auto& alpha = idx[ai];
      bool below = true;
      for (int d = 0; d < D; ++d) below = below && alpha[d] <= beta[d];
      if (!below) continue;
      double term = state.coeffs[ai];
      for (int d = 0; d < D; ++d) term *= table[d][beta[d]][alpha[d]];
      acc += term;
    }
    m[bi] = acc;
  }
  return m;
}

/// Re-expands coefficients from basis `from` to basis `to`, preserving every
/// raw moment of order <= M. The map is the truncated Taylor series of the
/// basis functions in their parameters:
///   d/du_d H_alpha = H_{alpha+e_d},   d/dtheta H_alpha = 1/2 sum_d H_{alpha+2e_d},
/// so a center shift is a convolution with (du^j/j!) along each axis and a
/// temperature change is exp(c T) with c = (theta_from - theta_to)/2 and
/// (T f)_alpha = sum_d f_{alpha-2e_d}. Both operators only raise the order, so
/// truncating at M keeps all moments up to M exact.
///
/// `out` may alias `in`. `scratch` must hold idx.size() doubles.
template <int D>
void rebase_coeffs(const MultiIndexSet<D>& idx, std::span<const double> in, const Basis<D>& from,
                   const Basis<D>& to, std::span<double> out, std::span<double> scratch) {
  const std::size_t n = idx.size();
  const int order = idx.order();
  if (out.data() != in.data()) std::copy(in.begin(), in.end(), out.begin());

  // A tap t_j moves f_m into f_{m+j}; in units of the target basis
  // (u_th^n / sqrt(n!)) it is amplified by at most (sqrt(M) / u_th)^j.
  // Taps whose amplified size is below kNegligible are dropped.
  constexpr double kNegligible = 1e-20;
  const double gain = std::sqrt(static_cast<double>(std::max(order, 1))) / to.uth;

  if constexpr (D == 1) {
    // Both maps are convolutions in 1D: taps shift^j / j! and (c^k / k!) at
    // stride 2. Their composition is applied in one pass.
    const double shift = from.u[0] - to.u[0];
    const double c = 0.5 * (from.theta() - to.theta());
    if (shift == 0.0 && c == 0.0) return;
    const int len = order + 1;
    std::array<double, 256> buf;
    std::vector<double> buf_big;
    double* taps = buf.data();
    if (3 * len > static_cast<int>(buf.size())) {
      buf_big.resize(3 * len);
      taps = buf_big.data();
    }
    double* du = taps + len;
    double* dt = taps + 2 * len;
    du[0] = dt[0] = 1.0;
    dt[1] = 0.0;
    int ju = 0, jt = 0;
    double bound = 1.0;
    for (int j = 1; j <= order && shift != 0.0; ++j) {
      du[j] = du[j - 1] * shift / j;
      bound *= std::abs(shift) * gain / j;
      ju = j;
      if (j > std::abs(shift) * gain && bound < kNegligible) break;
    }
    bound = 1.0;
    for (int k = 1; 2 * k <= order && c != 0.0; ++k) {
      dt[2 * k - 1] = 0.0;
      dt[2 * k] = dt[2 * k - 2] * c / k;
      bound *= std::abs(c) * gain * gain / k;
      jt = 2 * k;
      if (k > std::abs(c) * gain * gain && bound < kNegligible) break;
    }
    const int width = std::min(order, ju + jt);
    for (int m = 0; m <= width; ++m) {
      double acc = 0.0;
      for (int j = std::max(0, m - jt); j <= std::min(m, ju); ++j) acc += du[j] * dt[m - j];
      taps[m] = acc;
    }
    std::copy(out.begin(), out.end(), scratch.begin());
    const double* __restrict src = scratch.data();
    double* __restrict dst = out.data();
    for (int m = 1; m <= width; ++m) {
      const double g = taps[m];
      if (g == 0.0) continue;
      const std::size_t len_m = n - m;
      double* __restrict d = dst + m;
      for (std::size_t i = 0; i < len_m; ++i) d[i] += g * src[i];
    }
    return;
  }

  for (int d = 0; d < D; ++d) {
    const double shift = from.u[d] - to.u[d];
    if (shift == 0.0) continue;
    std::array<double, 128> c{};
    std::vector<double> c_big;
    double* cj = c.data();
    if (order + 1 > static_cast<int>(c.size())) {
      c_big.resize(order + 1);
      cj = c_big.data();
    }
    cj[0] = 1.0;
    int jmax = 0;
    double bound = 1.0;
    for (int j = 1; j <= order; ++j) {
      cj[j] = cj[j - 1] * shift / j;
      bound *= std::abs(shift) * gain / j;
      jmax = j;
      if (j > std::abs(shift) * gain && bound < kNegligible) break;
    }
    // Descending order: lower members of each chain are read before being overwritten.
    for (std::size_t i = n; i-- > 1;) {
      std::size_t k = idx.minus(i, d);
      double acc = out[i];
      for (int j = 1; j <= jmax && k != MultiIndexSet<D>::npos; ++j) {
        acc += cj[j] * out[k];
        k = idx.minus(k, d);
      }
      out[i] = acc;
    }
  }

  const double c = 0.5 * (from.theta() - to.theta());
  if (c != 0.0) {
    std::copy(out.begin(), out.end(), scratch.begin());
    const double x = D * std::abs(c) * gain * gain;
    double bound = 1.0;
    for (int k = 1; 2 * k <= order; ++k) {
      const double factor = c / k;
      bound *= x / k;
      for (std::size_t i = n; i-- > 0;) {
        double acc = 0.0;
        for (int d = 0; d < D; ++d) {
          const std::size_t a = idx.minus(i, d);
          if (a == MultiIndexSet<D>::npos) continue;
          const std::size_t b = idx.minus(a, d);
          if (b != MultiIndexSet<D>::npos) acc += scratch[b];
        }
        scratch[i] = factor * acc;
        out[i] += scratch[i];
      }
      if (k > x && bound < kNegligible) break;
    }
  }
}

/// Re-expansion of a whole state about (u_new, uth_new). Throws
/// IllConditionedRebase when a scaled coefficient |f_alpha| / uth_new^|alpha|
/// exceeds 1e6 rho.
template <int D>
MomentState<D> rebase(const MultiIndexSet<D>& idx, const MomentState<D>& state, const std::array<double, D>& u_new,
                      double uth_new) {
  if (!(uth_new > 0.0)) throw std::invalid_argument("rebase: thermal velocity must be positive");
  MomentState<D> out;
  out.basis.u = u_new;
  out.basis.uth = uth_new;
  out.coeffs.resize(state.coeffs.size());
  std::vector<double> scratch(state.coeffs.size());
  rebase_coeffs<D>(idx, state.coeffs, state.basis, out.basis, out.coeffs, scratch);

  const double limit = 1e6 * std::abs(state.coeffs[0]);
  double inv_scale = 1.0;
  for (int g = 0; g <= idx.order(); ++g) {
    for (std::size_t i = idx.grade_begin(g); i < idx.grade_end(g); ++i) {
      if (!std::isfinite(out.coeffs[i]) || std::abs(out.coeffs[i]) * inv_scale > limit) {
        throw IllConditionedRebase("rebase: re-expanded coefficients exceed the conditioning guard");
      }
    }
    inv_scale /= uth_new;
  }
  return out;
}

/// In-place constraint enforcement on raw coefficient storage. Returns the new
/// basis. Moves the center onto the mean velocity and thermal velocity of the
/// represented distribution, then zeroes f_{e_k} and the trace sum f_{2e_d}.
template <int D>
Basis<D> enforce_constraints_inplace(const MultiIndexSet<D>& idx, std::span<double> coeffs, const Basis<D>& basis,
                                     std::span<double> scratch) {
  const double rho = coeffs[0];
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    std::ostringstream msg;
    msg << "non-positive density " << rho;
    throw RealizabilityError(msg.str());
  }
  Basis<D> target = basis;
  double flux_sq = 0.0;
  double trace = 0.0;
  for (int d = 0; d < D; ++d) {
    const std::size_t e = idx.unit(d);
    const double fe = e == MultiIndexSet<D>::npos ? 0.0 : coeffs[e];
    target.u[d] = basis.u[d] + fe / rho;
    flux_sq += fe * fe;
    std::array<int, D> two{};
    two[d] = 2;
    const std::size_t e2 = idx.index_of(two);
    if (e2 != MultiIndexSet<D>::npos) trace += coeffs[e2];
  }
  // D rho theta' = D rho theta + 2 sum_d f_{2e_d} - |f_e|^2 / rho
  const double theta = basis.theta() + (2.0 * trace - flux_sq / rho) / (D * rho);
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    std::ostringstream msg;
    msg << "non-positive temperature " << theta;
    throw RealizabilityError(msg.str());
  }
  target.uth = std::sqrt(theta);
  if (!(target == basis)) rebase_coeffs<D>(idx, coeffs, basis, target, coeffs, scratch);

  double mean2 = 0.0;
  std::array<std::size_t, D> idx2{};
  for (int d = 0; d < D; ++d) {
    const std::size_t e = idx.unit(d);
    if (e != MultiIndexSet<D>::npos) coeffs[e] = 0.0;
    std::array<int, D> two{};
    two[d] = 2;
    idx2[d] = idx.index_of(two);
    if (idx2[d] != MultiIndexSet<D>::npos) mean2 += coeffs[idx2[d]] / D;
  }
  for (int d = 0; d < D; ++d) {
    if (idx2[d] == MultiIndexSet<D>::npos) continue;
    if constexpr (D == 1) {
      coeffs[idx2[d]] = 0.0;
    } else {
      coeffs[idx2[d]] -= mean2;
    }
  }
  return target;
}

template <int D>
MomentState<D> enforce_constraints(const MultiIndexSet<D>& idx, const MomentState<D>& state) {
  MomentState<D> out = state;
  std::vector<double> scratch(state.coeffs.size());
  out.basis = enforce_constraints_inplace<D>(idx, out.coeffs, state.basis, scratch);
  return out;
}

/// Largest deviation from f_{e_k} = 0 and sum_d f_{2e_d} = 0.
template <int D>
double constraint_residual(const MultiIndexSet<D>& idx, const MomentState<D>& state) {
  double r = 0.0;
  double trace = 0.0;
  for (int d = 0; d < D; ++d) {
    const std::size_t e = idx.unit(d);
    if (e != MultiIndexSet<D>::npos) r = std::max(r, std::abs(state.coeffs[e]));
    std::array<int, D> two{};
    two[d] = 2;
    const std::size_t e2 = idx.index_of(two);
    if (e2 != MultiIndexSet<D>::npos) trace += state.coeffs[e2];
  }
  return std::max(r, std::abs(trace));
}

}  // namespace hmevp
