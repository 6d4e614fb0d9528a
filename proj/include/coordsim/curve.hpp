#pragma once

#include <cstddef>
#include <vector>

namespace coordsim {

/// Monte Carlo summary of trace-norm gaps at one blocklength.
struct GapRow {
  std::size_t n = 0;
  std::size_t trials = 0;
  double mean_gap = 0.0;
  double std_err = 0.0;
  std::vector<double> gaps;  // per trial, in trial order
};

/// Mean and standard error (sample deviation / sqrt(trials)), summed in index
/// order.
GapRow summarize_gaps(std::size_t n, std::vector<double> gaps);

}  // namespace coordsim
