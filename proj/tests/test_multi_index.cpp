#include <gtest/gtest.h>

#include <set>

#include "hmevp/multi_index.hpp"

using hmevp::MultiIndexSet;

namespace {

long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(MultiIndex, CountMatchesBinomial) {
  for (int m = 0; m <= 60; ++m) {
    EXPECT_EQ(MultiIndexSet<1>(m).size(), static_cast<std::size_t>(binomial(m + 1, 1)));
    EXPECT_EQ(MultiIndexSet<2>(m).size(), static_cast<std::size_t>(binomial(m + 2, 2)));
    EXPECT_EQ(hmevp::multi_index_count(m, 2), static_cast<std::size_t>(binomial(m + 2, 2)));
  }
}

TEST(MultiIndex, GradedLexicographicOrder) {
  const MultiIndexSet<2> idx(7);
  EXPECT_EQ(idx[0], (MultiIndexSet<2>::Index{0, 0}));
  for (std::size_t i = 1; i < idx.size(); ++i) {
    const int g0 = idx.grade(i - 1), g1 = idx.grade(i);
    ASSERT_LE(g0, g1);
    if (g0 == g1) {
      EXPECT_LT(idx[i - 1][0], idx[i][0]);
    }
  }
  std::set<std::array<int, 2>> seen;
  for (std::size_t i = 0; i < idx.size(); ++i) seen.insert(idx[i]);
  EXPECT_EQ(seen.size(), idx.size());
}

TEST(MultiIndex, InverseMapRoundTrips) {
  const MultiIndexSet<2> idx(12);
  for (std::size_t i = 0; i < idx.size(); ++i) EXPECT_EQ(idx.index_of(idx[i]), i);
  EXPECT_EQ(idx.index_of({13, 0}), MultiIndexSet<2>::npos);
  EXPECT_EQ(idx.index_of({-1, 2}), MultiIndexSet<2>::npos);
}

TEST(MultiIndex, NeighborLookups) {
  const MultiIndexSet<2> idx(4);
  const std::size_t a = idx.index_of({1, 2});
  EXPECT_EQ(idx.plus(a, 0), idx.index_of({2, 2}));
  EXPECT_EQ(idx.minus(a, 1), idx.index_of({1, 1}));
  EXPECT_EQ(idx.minus(idx.index_of({0, 3}), 0), MultiIndexSet<2>::npos);
  EXPECT_EQ(idx.plus(idx.index_of({0, 4}), 1), MultiIndexSet<2>::npos);
  EXPECT_EQ(idx.unit(0), idx.index_of({1, 0}));
  EXPECT_EQ(idx.unit(1), idx.index_of({0, 1}));
}

TEST(MultiIndex, GradeBlocksAreContiguous) {
  const MultiIndexSet<2> idx(9);
  for (int g = 0; g <= 9; ++g) {
    EXPECT_EQ(idx.grade_end(g) - idx.grade_begin(g), static_cast<std::size_t>(g + 1));
    for (std::size_t i = idx.grade_begin(g); i < idx.grade_end(g); ++i) EXPECT_EQ(idx.grade(i), g);
  }
  const MultiIndexSet<1> one(5);
  EXPECT_EQ(one.grade_begin(3), 3u);
}
