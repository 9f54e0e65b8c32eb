#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hmevp/filter.hpp"
#include "hmevp/moment_state.hpp"

using namespace hmevp;

namespace {

FilterSpec spec_of(FilterKind kind) {
  FilterSpec s;
  s.kind = kind;
  return s;
}

}  // namespace

TEST(Filter, FactorExamples) {
  const auto hou = spec_of(FilterKind::hou_li);
  EXPECT_EQ(filter_factor(hou, 15, 30, 1.0), 1.0);
  EXPECT_EQ(filter_factor(hou, 20, 30, 1.0), 1.0);  // exactly 2/3
  EXPECT_DOUBLE_EQ(filter_factor(hou, 30, 30, 1.0), std::exp(-36.0));

  const auto quasi = spec_of(FilterKind::quasi_time_consistent);
  for (double dt : {1e-3, 0.1, 1.0, 7.0}) EXPECT_DOUBLE_EQ(filter_factor(quasi, 50, 50, dt), std::exp(-36.0));
  EXPECT_NEAR(std::exp(-36.0), 2.32e-16, 0.01e-16);

  // eta = 201/300, just above the cutoff, dt / T0 = 0.01.
  const double eta = 201.0 / 300.0;
  const double eg = std::pow(eta, 36.0);
  const double expected = std::exp(-36.0 * eg * std::pow(0.01, 1.0 - eg));
  EXPECT_DOUBLE_EQ(filter_factor(quasi, 201, 300, 0.01), expected);
  EXPECT_GT(1.0 - expected, 1e-7);
  EXPECT_LT(1.0 - expected, 1e-6);

  const auto ex = spec_of(FilterKind::exponential);
  EXPECT_DOUBLE_EQ(filter_factor(ex, 15, 30, 1.0), std::exp(-36.0 * std::pow(0.5, 36.0)));
  EXPECT_EQ(filter_factor(spec_of(FilterKind::none), 30, 30, 1.0), 1.0);
}

TEST(Filter, ApplyNoneIsIdentity) {
  const MultiIndexSet<2> idx(10);
  MomentState<2> s = maxwellian_state<2>(idx, 1.0, {0.0, 0.0}, 1.0);
  for (std::size_t k = 0; k < idx.size(); ++k) s.coeffs[k] = 0.01 * static_cast<double>(k + 1);
  const auto r = apply_filter<2>(idx, s, spec_of(FilterKind::none), 1.0);
  EXPECT_EQ(r.coeffs, s.coeffs);
}

TEST(Filter, HouLiOrderThreeTouchesOnlyTopGrade) {
  const MultiIndexSet<1> idx(3);
  MomentState<1> s = maxwellian_state<1>(idx, 1.0, {0.0}, 1.0);
  s.coeffs = {1.0, 0.0, 0.0, 0.5};
  const auto r = apply_filter<1>(idx, s, spec_of(FilterKind::hou_li), 1.0);
  EXPECT_EQ(r.coeffs[0], 1.0);
  EXPECT_EQ(r.coeffs[2], 0.0);
  EXPECT_DOUBLE_EQ(r.coeffs[3], 0.5 * std::exp(-36.0));
}

TEST(Filter, ProtectedGradesUntouchedForEveryKind) {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const MultiIndexSet<2> idx(12);
  for (auto kind : {FilterKind::exponential, FilterKind::hou_li, FilterKind::quasi_time_consistent}) {
    MomentState<2> s = maxwellian_state<2>(idx, 1.0, {0.0, 0.0}, 1.0);
    for (std::size_t k = 0; k < idx.size(); ++k) s.coeffs[k] = uni(rng);
    const auto r = apply_filter<2>(idx, s, spec_of(kind), 0.3);
    for (std::size_t k = 0; k < idx.grade_end(2); ++k) EXPECT_EQ(r.coeffs[k], s.coeffs[k]);
    for (std::size_t k = 0; k < idx.size(); ++k) EXPECT_LE(std::abs(r.coeffs[k]), std::abs(s.coeffs[k]));
  }
}

TEST(Filter, CommutesWithScaling) {
  const MultiIndexSet<1> idx(30);
  MomentState<1> s = maxwellian_state<1>(idx, 1.0, {0.0}, 1.0);
  for (int n = 3; n <= 30; ++n) s.coeffs[n] = 1.0 / n;
  MomentState<1> scaled = s;
  for (double& c : scaled.coeffs) c *= 4.0;
  const auto spec = spec_of(FilterKind::quasi_time_consistent);
  const auto a = apply_filter<1>(idx, scaled, spec, 0.2);
  const auto b = apply_filter<1>(idx, s, spec, 0.2);
  for (int n = 0; n <= 30; ++n) EXPECT_EQ(a.coeffs[n], 4.0 * b.coeffs[n]);
}

TEST(Filter, QuasiContinuousInTimeStep) {
  const auto spec = spec_of(FilterKind::quasi_time_consistent);
  for (int g = 21; g <= 30; ++g) {
    const double a = filter_factor(spec, g, 30, 0.5);
    const double b = filter_factor(spec, g, 30, 0.5 * (1.0 + 1e-9));
    EXPECT_NEAR(a, b, 1e-7 * std::max(a, 1e-300) + 1e-300) << g;
  }
}

TEST(Filter, ValidateHouLiPassesAll) {
  for (int m : {30, 90, 300}) {
    const auto v = validate_filter(spec_of(FilterKind::hou_li), m, 1.0);
    EXPECT_TRUE(v.rotational);
    EXPECT_TRUE(v.conservation);
    EXPECT_TRUE(v.monotone);
    EXPECT_TRUE(v.limit);
  }
}

TEST(Filter, ValidateExponentialFailsConservationOnly) {
  const auto v = validate_filter(spec_of(FilterKind::exponential), 30, 1.0);
  EXPECT_TRUE(v.rotational);
  EXPECT_FALSE(v.conservation);
  EXPECT_TRUE(v.monotone);
  EXPECT_FALSE(v.all());
  // sigma(1/30) rounds to 1 in double precision; the exponent does not vanish.
  EXPECT_GT(filter_exponent(spec_of(FilterKind::exponential), 1, 30, 1.0), 0.0);
}

TEST(Filter, ValidateQuasiSmallSteps) {
  for (int m : {30, 90, 300}) {
    for (double dt : {0.01, 0.1, 1.0}) {
      EXPECT_TRUE(validate_filter(spec_of(FilterKind::quasi_time_consistent), m, dt).all()) << m << " " << dt;
    }
  }
}

// With dt / T0 = 10 the factor zeta^(1 - eta^gamma) grows faster than
// eta^gamma shrinks near eta = 1, so sigma(29/30) < sigma(1).
TEST(Filter, ValidateQuasiLargeStepNotMonotone) {
  const auto spec = spec_of(FilterKind::quasi_time_consistent);
  const double e29 = std::pow(29.0 / 30.0, 36.0);
  const double a29 = 36.0 * e29 * std::pow(10.0, 1.0 - e29);
  EXPECT_GT(a29, 36.0);
  EXPECT_NEAR(filter_exponent(spec, 29, 30, 10.0), a29, 1e-12 * a29);
  const auto v = validate_filter(spec, 30, 10.0);
  EXPECT_FALSE(v.monotone);
  EXPECT_TRUE(v.rotational);
  EXPECT_TRUE(v.conservation);
}

TEST(Filter, TimeConsistencyDefect) {
  const auto quasi = spec_of(FilterKind::quasi_time_consistent);
  const auto hou = spec_of(FilterKind::hou_li);
  // At eta = 1 both sides are exp(-36 k).
  const double top_a = std::pow(filter_factor(quasi, 30, 30, 1.0), 1);
  const double top_b = std::pow(filter_factor(quasi, 30, 30, 0.5), 2);
  EXPECT_NEAR(top_a, std::exp(-36.0), 1e-30);
  EXPECT_NEAR(top_b, std::exp(-72.0), 1e-40);

  const double d_hou = time_consistency_defect(hou, 30, 1.0, 1, 0.5, 2);
  const double d_quasi = time_consistency_defect(quasi, 30, 1.0, 1, 0.5, 2);
  EXPECT_GT(d_hou, 0.0);
  EXPECT_LT(d_quasi, d_hou);
  // Hou-Li at eta = 21/30: sigma - sigma^2 = sigma (1 - sigma).
  const double s = filter_factor(hou, 21, 30, 1.0);
  EXPECT_GE(d_hou, s * (1.0 - s));
  EXPECT_THROW(time_consistency_defect(hou, 30, 1.0, 1, 0.4, 2), std::invalid_argument);
}

TEST(Filter, KindNamesRoundTrip) {
  for (auto k : {FilterKind::none, FilterKind::exponential, FilterKind::hou_li, FilterKind::quasi_time_consistent}) {
    EXPECT_EQ(filter_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(filter_kind_from_string("gaussian"), std::invalid_argument);
}
