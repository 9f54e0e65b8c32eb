#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace hmevp {

/// Enumeration of all multi-indices alpha in N^D with |alpha| <= M, stored in
/// graded lexicographic order. Index 0 is alpha = 0 and every grade occupies a
/// contiguous block, so "all indices with |alpha| <= g" is a prefix.
template <int D>
class MultiIndexSet {
  static_assert(D == 1 || D == 2, "only D = 1 and D = 2 are supported");

 public:
  using Index = std::array<int, D>;
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  MultiIndexSet() : MultiIndexSet(0) {}

  explicit MultiIndexSet(int order) : order_(order) {
    if (order < 0) throw std::invalid_argument("MultiIndexSet: negative order");
    for (int g = 0; g <= order; ++g) {
      grade_begin_.push_back(entries_.size());
      if constexpr (D == 1) {
        entries_.push_back(Index{g});
      } else {
        for (int a = 0; a <= g; ++a) entries_.push_back(Index{a, g - a});
      }
    }
    grade_begin_.push_back(entries_.size());

    plus_.assign(entries_.size() * D, npos);
    minus_.assign(entries_.size() * D, npos);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      for (int d = 0; d < D; ++d) {
        Index up = entries_[i];
        ++up[d];
        plus_[i * D + d] = index_of(up);
        Index down = entries_[i];
        --down[d];
        minus_[i * D + d] = index_of(down);
      }
    }
  }

  int order() const { return order_; }
  std::size_t size() const { return entries_.size(); }
  const Index& operator[](std::size_t i) const { return entries_[i]; }

  int grade(std::size_t i) const {
    int g = 0;
    for (int d = 0; d < D; ++d) g += entries_[i][d];
    return g;
  }

  /// First linear index of grade g (g may be order()+1 to get the end).
  std::size_t grade_begin(int g) const { return grade_begin_[g]; }
  std::size_t grade_end(int g) const { return grade_begin_[g + 1]; }

  /// Linear index of alpha, or npos when a component is negative or |alpha| > M.
  std::size_t index_of(const Index& alpha) const {
    int g = 0;
    for (int d = 0; d < D; ++d) {
      if (alpha[d] < 0) return npos;
      g += alpha[d];
    }
    if (g > order_) return npos;
    if constexpr (D == 1) {
      return static_cast<std::size_t>(g);
    } else {
      return static_cast<std::size_t>(g) * (g + 1) / 2 + alpha[0];
    }
  }

  /// alpha + e_d, or npos.
  std::size_t plus(std::size_t i, int d) const { return plus_[i * D + d]; }
  /// alpha - e_d, or npos.
  std::size_t minus(std::size_t i, int d) const { return minus_[i * D + d]; }

  /// Index of the unit multi-index e_d.
  std::size_t unit(int d) const {
    Index e{};
    e[d] = 1;
    return index_of(e);
  }

 private:
  int order_;
  std::vector<Index> entries_;
  std::vector<std::size_t> grade_begin_;
  std::vector<std::size_t> plus_;
  std::vector<std::size_t> minus_;
};

/// binomial(M + D, D), the number of multi-indices with |alpha| <= M.
constexpr std::size_t multi_index_count(int order, int dim) {
  std::size_t num = 1;
  for (int i = 1; i <= dim; ++i) num = num * static_cast<std::size_t>(order + i) / i;
  return num;
}

}  // namespace hmevp
