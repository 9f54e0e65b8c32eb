#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "hmevp/errors.hpp"

namespace hmevp {

/// Probabilists' Hermite polynomial He_n(x) by the three-term recurrence.
inline double hermite_eval(int n, double x) {
  if (n < 0) throw std::invalid_argument("hermite_eval: negative order");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// He_0(x) .. He_n(x) written into out[0..n].
inline void hermite_eval_all(int n, double x, double* out) {
  out[0] = 1.0;
  if (n >= 1) out[1] = x;
  for (int k = 1; k < n; ++k) out[k + 1] = x * out[k] - k * out[k - 1];
}

namespace detail {

// Orthonormal Hermite values h_n = He_n / sqrt(n!); they do not overflow for
// the orders used here, unlike n! itself.
inline double normalized_hermite(int n, double x) {
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                        std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace detail

/// All n zeros of He_n, ascending. Eigenvalues of the symmetric Jacobi matrix
/// (zero diagonal, off-diagonal sqrt(k)) followed by one Newton step each.
inline std::vector<double> hermite_zeros(int n) {
  if (n < 1) throw std::invalid_argument("hermite_zeros: order must be >= 1");
  if (n == 1) return {0.0};

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("hermite_zeros: Jacobi eigen-solve did not converge");
  }

  std::vector<double> z(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  std::sort(z.begin(), z.end());
  for (double& x : z) {
    // He_n' = n He_{n-1}; the ratio is evaluated in normalized form.
    const double hn = detail::normalized_hermite(n, x);
    const double hn1 = detail::normalized_hermite(n - 1, x);
    if (hn1 != 0.0) x -= hn / (std::sqrt(static_cast<double>(n)) * hn1);
  }
  for (int i = 0; i < n / 2; ++i) {
    const double a = 0.5 * (z[n - 1 - i] - z[i]);
    z[i] = -a;
    z[n - 1 - i] = a;
  }
  if (n % 2 == 1) z[n / 2] = 0.0;
  return z;
}

/// Gauss-Hermite weights for the zeros of He_n, normalized against the unit
/// Gaussian density, so they sum to one.
inline std::vector<double> gauss_hermite_weights(int n, const std::vector<double>& zeros) {
  std::vector<double> w(zeros.size());
  for (std::size_t j = 0; j < zeros.size(); ++j) {
    const double h = detail::normalized_hermite(n - 1, zeros[j]);
    w[j] = 1.0 / (n * h * h);
  }
  return w;
}

inline std::vector<double> gauss_hermite_weights(int n) {
  return gauss_hermite_weights(n, hermite_zeros(n));
}

/// Zeros and normalized quadrature weights of He_n.
struct HermiteTable {
  int order = 0;
  std::vector<double> zeros;
  std::vector<double> weights;

  explicit HermiteTable(int n) : order(n), zeros(hermite_zeros(n)), weights(gauss_hermite_weights(n, zeros)) {}

  double max_zero() const { return zeros.back(); }

  /// Shared, lazily built table for order n.
  static const HermiteTable& get(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<HermiteTable>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<HermiteTable>(n);
    return *slot;
  }
};

}  // namespace hmevp
