#include "coordsim/curve.hpp"

#include <cmath>

namespace coordsim {

GapRow summarize_gaps(std::size_t n, std::vector<double> gaps) {
  GapRow row;
  row.n = n;
  row.trials = gaps.size();
  if (gaps.empty()) return row;
  double sum = 0.0;
  for (double g : gaps) sum += g;
  row.mean_gap = sum / static_cast<double>(gaps.size());
  if (gaps.size() > 1) {
    double sq = 0.0;
    for (double g : gaps) sq += (g - row.mean_gap) * (g - row.mean_gap);
    const double var = sq / static_cast<double>(gaps.size() - 1);
    row.std_err = std::sqrt(var / static_cast<double>(gaps.size()));
  }
  row.gaps = std::move(gaps);
  return row;
}

}  // namespace coordsim
