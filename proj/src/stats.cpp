#include "mpcg/stats.hpp"

#include <algorithm>
#include <cmath>

#include "mpcg/errors.hpp"

namespace mpcg {

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw EmptyInput("percentile of empty sample");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

Summary summarize(const std::vector<double>& values) {
  if (values.empty()) throw EmptyInput("summarize of empty sample");
  const std::size_t n = values.size();
  double sum = 0.0;
  double lo = values[0], hi = values[0];
  for (double v : values) {
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double stddev =
      n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return {mean, stddev, lo, hi, percentile(values, 0.25),
          percentile(values, 0.75)};
}

}  // namespace mpcg
