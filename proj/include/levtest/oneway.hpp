#pragma once

#include <vector>

namespace levtest {

/// Sums of squares of a one-way layout.
struct OneWayTable {
  double between_ss = 0.0;  ///< sum_i n_i (mean_i - grand)^2
  double within_ss = 0.0;   ///< sum_i sum_j (y_ij - mean_i)^2
  double df1 = 0.0;         ///< k - 1
  double df2 = 0.0;         ///< N - k
  double f = 0.0;
  std::vector<double> group_means;
};

/// Classical one-way ANOVA F on a ragged array. Throws DegenerateDataError
/// when the within-group sum of squares vanishes (relative to the total sum
/// of squares of y), since F is then 0/0 or unbounded.
OneWayTable one_way_anova(const std::vector<std::vector<double>>& groups);

}  // namespace levtest
