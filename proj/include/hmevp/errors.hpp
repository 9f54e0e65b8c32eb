#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hmevp {

/// Internal numerical failure (eigen-solve, ill-conditioned re-expansion).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a re-expansion produces coefficients beyond the conditioning guard.
class IllConditionedRebase : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Non-positive density or temperature derived from the moments of a cell.
class RealizabilityError : public NumericalError {
 public:
  explicit RealizabilityError(const std::string& what, std::ptrdiff_t cell = -1, double time = 0.0)
      : NumericalError(what), cell_(cell), time_(time) {}

  std::ptrdiff_t cell() const { return cell_; }
  double time() const { return time_; }

 private:
  std::ptrdiff_t cell_;
  double time_;
};

/// Bad configuration key or value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hmevp
