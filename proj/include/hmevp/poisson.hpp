#pragma once

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace hmevp {

namespace detail {

// FFTW planning is not thread-safe.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Eigenvalue of -(phi_{j+1} - 2 phi_j + phi_{j-1})/h^2 for Fourier mode m of n.
inline double laplacian_symbol(int m, int n, double h) {
  const double angle = 2.0 * std::numbers::pi * m / n;
  return (2.0 - 2.0 * std::cos(angle)) / (h * h);
}

}  // namespace detail

/// Periodic Poisson solver for -lap_h phi = rho - rho0 with the second-order
/// central stencil in each direction. The stencil is inverted exactly in
/// Fourier space; the right-hand side is made mean-free and phi has zero mean.
/// Plans use FFTW_ESTIMATE so repeated runs are bit-reproducible.
template <int D>
class PoissonSolver {
  static_assert(D == 1 || D == 2);

 public:
  PoissonSolver(const std::array<int, D>& n, const std::array<double, D>& h) : n_(n), h_(h) {
    total_ = 1;
    for (int d = 0; d < D; ++d) total_ *= static_cast<std::size_t>(n[d]);
    if constexpr (D == 1) {
      spectral_ = static_cast<std::size_t>(n[0] / 2 + 1);
    } else {
      spectral_ = static_cast<std::size_t>(n[1]) * (n[0] / 2 + 1);
    }
    real_ = fftw_alloc_real(total_);
    freq_ = fftw_alloc_complex(spectral_);
    {
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      if constexpr (D == 1) {
        forward_ = fftw_plan_dft_r2c_1d(n[0], real_, freq_, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r_1d(n[0], freq_, real_, FFTW_ESTIMATE);
      } else {
        // Row-major with x fastest: FFTW's last dimension is x.
        forward_ = fftw_plan_dft_r2c_2d(n[1], n[0], real_, freq_, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r_2d(n[1], n[0], freq_, real_, FFTW_ESTIMATE);
      }
    }
    inverse_symbol_.assign(spectral_, 0.0);
    const int nx_half = n[0] / 2 + 1;
    for (std::size_t s = 0; s < spectral_; ++s) {
      const int mx = static_cast<int>(s % nx_half);
      const int my = static_cast<int>(s / nx_half);
      double lambda = detail::laplacian_symbol(mx, n[0], h[0]);
      if constexpr (D == 2) lambda += detail::laplacian_symbol(my, n[1], h[1]);
      inverse_symbol_[s] = lambda > 0.0 ? 1.0 / (lambda * static_cast<double>(total_)) : 0.0;
    }
    inverse_symbol_[0] = 0.0;
  }

  PoissonSolver(const PoissonSolver&) = delete;
  PoissonSolver& operator=(const PoissonSolver&) = delete;

  ~PoissonSolver() {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(real_);
    fftw_free(freq_);
  }

  std::size_t size() const { return total_; }

  /// phi for the source rho - rho0 (rho laid out with x fastest).
  void solve(std::span<const double> rho, double rho0, std::span<double> phi) {
    double mean = 0.0;
    for (std::size_t i = 0; i < total_; ++i) mean += rho[i] - rho0;
    mean /= static_cast<double>(total_);
    for (std::size_t i = 0; i < total_; ++i) real_[i] = rho[i] - rho0 - mean;
    fftw_execute(forward_);
    for (std::size_t s = 0; s < spectral_; ++s) {
      freq_[s][0] *= inverse_symbol_[s];
      freq_[s][1] *= inverse_symbol_[s];
    }
    fftw_execute(backward_);
    double phi_mean = 0.0;
    for (std::size_t i = 0; i < total_; ++i) phi_mean += real_[i];
    phi_mean /= static_cast<double>(total_);
    for (std::size_t i = 0; i < total_; ++i) phi[i] = real_[i] - phi_mean;
  }

 private:
  std::array<int, D> n_;
  std::array<double, D> h_;
  std::size_t total_ = 0;
  std::size_t spectral_ = 0;
  double* real_ = nullptr;
  fftw_complex* freq_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
  std::vector<double> inverse_symbol_;
};

template <int D>
std::vector<double> solve_poisson(std::span<const double> rho, double rho0, const std::array<int, D>& n,
                                  const std::array<double, D>& h) {
  PoissonSolver<D> solver(n, h);
  std::vector<double> phi(solver.size());
  solver.solve(rho, rho0, phi);
  return phi;
}

/// E_d = -(phi_{+e_d} - phi_{-e_d}) / (2 h_d); E[d] holds direction d.
template <int D>
void electric_field(std::span<const double> phi, const std::array<int, D>& n, const std::array<double, D>& h,
                    std::array<std::vector<double>, D>& e) {
  const int nx = n[0];
  const int ny = D == 2 ? n[D - 1] : 1;
  for (int d = 0; d < D; ++d) e[d].assign(phi.size(), 0.0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t c = static_cast<std::size_t>(j) * nx + i;
      const int ip = (i + 1) % nx;
      const int im = (i + nx - 1) % nx;
      e[0][c] = -(phi[static_cast<std::size_t>(j) * nx + ip] - phi[static_cast<std::size_t>(j) * nx + im]) /
                (2.0 * h[0]);
      if constexpr (D == 2) {
        const int jp = (j + 1) % ny;
        const int jm = (j + ny - 1) % ny;
        e[1][c] = -(phi[static_cast<std::size_t>(jp) * nx + i] - phi[static_cast<std::size_t>(jm) * nx + i]) /
                  (2.0 * h[1]);
      }
    }
  }
}

template <int D>
std::array<std::vector<double>, D> electric_field(std::span<const double> phi, const std::array<int, D>& n,
                                                  const std::array<double, D>& h) {
  std::array<std::vector<double>, D> e;
  electric_field<D>(phi, n, h, e);
  return e;
}

}  // namespace hmevp
