#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hmevp/moment_state.hpp"
#include "hmevp/multi_index.hpp"

namespace hmevp {

/// Uniform periodic mesh of moment states. Cells are stored with x fastest;
/// cell c has center (i + 1/2) dx (and (j + 1/2) dy in 2D).
template <int D>
struct Grid {
  MultiIndexSet<D> index;
  std::array<int, D> n{};
  std::array<double, D> length{};
  std::array<double, D> dx{};
  std::vector<MomentState<D>> cells;

  Grid() = default;

  Grid(int order, const std::array<int, D>& counts, const std::array<double, D>& lengths)
      : index(order), n(counts), length(lengths) {
    std::size_t total = 1;
    for (int d = 0; d < D; ++d) {
      if (counts[d] < 1) throw std::invalid_argument("Grid: cell count must be positive");
      if (!(lengths[d] > 0.0)) throw std::invalid_argument("Grid: length must be positive");
      dx[d] = lengths[d] / counts[d];
      total *= static_cast<std::size_t>(counts[d]);
    }
    cells.assign(total, maxwellian_state<D>(index, 1.0, {}, 1.0));
  }

  int order() const { return index.order(); }
  std::size_t size() const { return cells.size(); }

  double cell_volume() const {
    double v = 1.0;
    for (int d = 0; d < D; ++d) v *= dx[d];
    return v;
  }

  std::array<int, D> position(std::size_t c) const {
    std::array<int, D> p{};
    p[0] = static_cast<int>(c % n[0]);
    if constexpr (D == 2) p[1] = static_cast<int>(c / n[0]);
    return p;
  }

  std::size_t linear(const std::array<int, D>& p) const {
    if constexpr (D == 1) {
      return static_cast<std::size_t>(p[0]);
    } else {
      return static_cast<std::size_t>(p[1]) * n[0] + p[0];
    }
  }

  /// Periodic neighbor of c shifted by `offset` cells along direction d.
  std::size_t neighbor(std::size_t c, int d, int offset) const {
    auto p = position(c);
    p[d] = ((p[d] + offset) % n[d] + n[d]) % n[d];
    return linear(p);
  }

  std::array<double, D> center(std::size_t c) const {
    const auto p = position(c);
    std::array<double, D> x{};
    for (int d = 0; d < D; ++d) x[d] = (p[d] + 0.5) * dx[d];
    return x;
  }

  std::vector<double> density() const {
    std::vector<double> rho(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) rho[c] = cells[c].coeffs[0];
    return rho;
  }
};

}  // namespace hmevp
