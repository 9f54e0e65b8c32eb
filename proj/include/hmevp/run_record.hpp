#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hmevp/diagnostics.hpp"

namespace hmevp {

/// Per-grade coefficient norms sqrt(sum_cells sum_{|alpha|=n} f_alpha^2 dV) at time t.
struct SpectrumSnapshot {
  double t = 0.0;
  std::vector<double> norms;
};

struct RunRecord {
  int dim = 1;
  TimeSeries series;
  std::vector<SpectrumSnapshot> spectra;
  std::string config_echo;
  double wall_seconds = 0.0;
  long steps = 0;

  bool failed = false;
  std::string failure;
  double failure_time = 0.0;
  std::ptrdiff_t failure_cell = -1;
};

}  // namespace hmevp
