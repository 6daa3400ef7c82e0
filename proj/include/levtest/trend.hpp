#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "levtest/data.hpp"

namespace levtest {

/// One score per group. Scores must be pairwise distinct; they need not be
/// increasing (a decreasing vector tests the reversed ordering).
struct ScoreSet {
  std::vector<double> w;

  /// 1, 2, ..., k.
  static ScoreSet linear(std::size_t k);
  /// Throws std::invalid_argument on a length mismatch, non-finite or tied scores.
  void validate(std::size_t k) const;
};

enum class Side { Increasing, Decreasing, TwoSided };

std::string_view to_string(Side side);
/// "increasing", "decreasing", "two-sided".
Side parse_side(std::string_view name);

struct TrendResult {
  double beta_hat = 0.0;
  double std_error = 0.0;
  double z_statistic = 0.0;
  double p_one_sided_increasing = 1.0;
  double p_one_sided_decreasing = 1.0;
  double p_two_sided = 1.0;
  CenterKind center_kind;
  std::vector<double> scores;

  double p_value(Side side) const;
};

/// Slope of the n_i-weighted regression of the group deviation means on the
/// scores,
///   beta = sum n_i (w_i - wbar)(zbar_i - zbar) / sum n_i (w_i - wbar)^2,
/// standardized by sqrt(s^2 / sum n_i (w_i - wbar)^2) with s^2 the pooled
/// within-group variance of the deviations on N - k degrees of freedom, and
/// referred to the standard normal.
TrendResult trend_test(const GroupedSample& sample, const ScoreSet& scores, CenterKind kind);

}  // namespace levtest
