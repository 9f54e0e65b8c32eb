#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hmevp/moment_state.hpp"
#include "hmevp/multi_index.hpp"

namespace hmevp {

enum class FilterKind { none, exponential, hou_li, quasi_time_consistent };

inline std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::none: return "none";
    case FilterKind::exponential: return "exponential";
    case FilterKind::hou_li: return "hou_li";
    case FilterKind::quasi_time_consistent: return "quasi";
  }
  return "none";
}

inline FilterKind filter_kind_from_string(std::string_view s) {
  if (s == "none") return FilterKind::none;
  if (s == "exponential" || s == "exp") return FilterKind::exponential;
  if (s == "hou_li" || s == "houli") return FilterKind::hou_li;
  if (s == "quasi" || s == "quasi_time_consistent") return FilterKind::quasi_time_consistent;
  throw std::invalid_argument("unknown filter kind '" + std::string(s) + "'");
}

struct FilterSpec {
  FilterKind kind = FilterKind::quasi_time_consistent;
  double beta = 36.0;
  double gamma = 36.0;
  double cutoff = 2.0 / 3.0;
  double t0 = 1.0;
  int protected_order = 2;

  void validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("filter.beta must be positive");
    if (!(gamma > 0.0)) throw std::invalid_argument("filter.gamma must be positive");
    if (!(cutoff > 0.0 && cutoff < 1.0)) throw std::invalid_argument("filter.cutoff must lie in (0, 1)");
    if (!(t0 > 0.0)) throw std::invalid_argument("filter.t0 must be positive");
    if (protected_order < 2) throw std::invalid_argument("filter.m0 must be >= 2");
  }
};

namespace detail {

// |alpha|/M <= cutoff. The default 2/3 is decided in integers (3|alpha| <= 2M).
inline bool below_cutoff(int grade, int order, double cutoff) {
  if (cutoff == 2.0 / 3.0) return 3 * grade <= 2 * order;
  return grade <= cutoff * order * (1.0 + 4.0 * std::numeric_limits<double>::epsilon());
}

}  // namespace detail

/// Damping exponent a >= 0 with sigma = exp(-a) for a multi-index of total
/// order `grade` at expansion order M and step length dt. Conditions are
/// checked on the exponent: for steep families sigma rounds to 1.0 long
/// before the exponent vanishes.
inline double filter_exponent(const FilterSpec& spec, int grade, int order, double dt) {
  const double eta = static_cast<double>(grade) / order;
  switch (spec.kind) {
    case FilterKind::none:
      return 0.0;
    case FilterKind::exponential:
      return spec.beta * std::pow(eta, spec.gamma);
    case FilterKind::hou_li:
      if (detail::below_cutoff(grade, order, spec.cutoff)) return 0.0;
      return spec.beta * std::pow(eta, spec.gamma);
    case FilterKind::quasi_time_consistent: {
      if (detail::below_cutoff(grade, order, spec.cutoff)) return 0.0;
      if (!(dt > 0.0)) throw std::invalid_argument("filter_factor: quasi filter needs dt > 0");
      const double eta_g = std::pow(eta, spec.gamma);
      // g(eta, zeta) = zeta^(1 - eta^gamma), zeta = dt / T0
      return spec.beta * eta_g * std::pow(dt / spec.t0, 1.0 - eta_g);
    }
  }
  return 0.0;
}

/// Filter factor sigma; depends on alpha only through |alpha|.
inline double filter_factor(const FilterSpec& spec, int grade, int order, double dt) {
  const double a = filter_exponent(spec, grade, order, dt);
  return a == 0.0 ? 1.0 : std::exp(-a);
}

template <int D>
double filter_factor(const FilterSpec& spec, const typename MultiIndexSet<D>::Index& alpha, int order, double dt) {
  int grade = 0;
  for (int d = 0; d < D; ++d) grade += alpha[d];
  return filter_factor(spec, grade, order, dt);
}

/// sigma per grade 0..M as applied to coefficients: grades <= protected_order
/// are never touched, whatever the family.
inline std::vector<double> filter_factors_by_grade(const FilterSpec& spec, int order, double dt) {
  std::vector<double> sigma(order + 1, 1.0);
  if (spec.kind == FilterKind::none) return sigma;
  for (int g = spec.protected_order + 1; g <= order; ++g) sigma[g] = filter_factor(spec, g, order, dt);
  return sigma;
}

template <int D>
void apply_filter_inplace(const MultiIndexSet<D>& idx, std::span<double> coeffs, const std::vector<double>& sigma) {
  for (int g = 0; g <= idx.order(); ++g) {
    if (sigma[g] == 1.0) continue;
    for (std::size_t i = idx.grade_begin(g); i < idx.grade_end(g); ++i) coeffs[i] *= sigma[g];
  }
}

template <int D>
MomentState<D> apply_filter(const MultiIndexSet<D>& idx, const MomentState<D>& state, const FilterSpec& spec,
                            double dt) {
  MomentState<D> out = state;
  apply_filter_inplace<D>(idx, out.coeffs, filter_factors_by_grade(spec, idx.order(), dt));
  return out;
}

struct FilterValidation {
  bool rotational = true;    // sigma depends on alpha only through |alpha|
  bool conservation = true;  // sigma = 1 for |alpha| <= 2
  bool monotone = true;      // sigma(|alpha|/M) >= sigma((|alpha|+1)/M)
  bool limit = true;         // sigma -> 1 as M grows, for fixed alpha

  bool all() const { return rotational && conservation && monotone && limit; }
};

/// Checks the four necessary conditions on the raw factor family (no
/// protected-order override). D = 2 multi-indices are used for the
/// rotational check.
inline FilterValidation validate_filter(const FilterSpec& spec, int order, double dt) {
  if (order < 3) throw std::invalid_argument("validate_filter: order must be >= 3");
  FilterValidation r;
  auto expo = [&](int g, int m) { return filter_exponent(spec, g, m, dt); };

  const MultiIndexSet<2> idx(order);
  for (int g = 0; g <= order; ++g) {
    const double ref = expo(g, order);
    for (std::size_t i = idx.grade_begin(g); i < idx.grade_end(g); ++i) {
      if (filter_exponent(spec, idx[i][0] + idx[i][1], order, dt) != ref) r.rotational = false;
    }
  }

  for (int g = 0; g <= 2; ++g) {
    if (expo(g, order) != 0.0) r.conservation = false;
  }

  for (int g = 0; g < order; ++g) {
    if (expo(g, order) > expo(g + 1, order)) r.monotone = false;
  }

  // For each grade of the base order, the exponent at M, 2M, 4M, 8M must not
  // increase and sigma must end within 1e-12 of one.
  for (int g = 0; g <= order; ++g) {
    double prev = expo(g, order);
    for (int m = 2 * order; m <= 8 * order; m *= 2) {
      const double cur = expo(g, m);
      if (cur > prev) r.limit = false;
      prev = cur;
    }
    if (-std::expm1(-prev) > 1e-12) r.limit = false;
  }
  return r;
}

/// max over grades of |sigma(dt1)^k1 - sigma(dt2)^k2|, with k1 dt1 = k2 dt2.
inline double time_consistency_defect(const FilterSpec& spec, int order, double dt1, int k1, double dt2, int k2) {
  if (std::abs(k1 * dt1 - k2 * dt2) > 1e-12 * std::max(k1 * dt1, k2 * dt2)) {
    throw std::invalid_argument("time_consistency_defect: k1*dt1 must equal k2*dt2");
  }
  double defect = 0.0;
  for (int g = 0; g <= order; ++g) {
    const double a = std::pow(filter_factor(spec, g, order, dt1), k1);
    const double b = std::pow(filter_factor(spec, g, order, dt2), k2);
    defect = std::max(defect, std::abs(a - b));
  }
  return defect;
}

}  // namespace hmevp
