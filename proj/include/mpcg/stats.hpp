#pragma once

#include <vector>

namespace mpcg {

/// Aggregate statistics in the shape of the report tables.
struct Summary {
  double mean;
  double stddev;  // sample convention (n-1); 0 for a single value
  double min;
  double max;
  double p25;
  double p75;
};

/// Linear-interpolation percentile between closest ranks of the sorted
/// sample; q in [0, 1].
double percentile(std::vector<double> values, double q);

/// Throws EmptyInput for an empty sample.
Summary summarize(const std::vector<double>& values);

}  // namespace mpcg
