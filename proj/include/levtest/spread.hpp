#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "levtest/data.hpp"

namespace levtest {

/// Outcome of a hypothesis test. For chi-squared referenced tests df1 holds
/// the degrees of freedom and df2 is empty.
struct TestResult {
  std::string method;
  double statistic = 0.0;
  double df1 = 0.0;
  std::optional<double> df2;
  double p_value = 1.0;
  std::optional<CenterKind> center;
  std::optional<Correction> correction;
  /// Auxiliary named quantities (e.g. the uncorrected Bartlett M).
  std::vector<std::pair<std::string, double>> details;

  std::optional<double> detail(const std::string& name) const;
};

/// Levene-type homogeneity test: one-way ANOVA on absolute deviations from
/// the group centers, optionally after a Hines-Hines or O'Brien correction.
///
/// Requires n_i >= 2 (n_i >= 3 with Hines-Hines, which also needs median
/// centers). Throws std::invalid_argument for those precondition failures and
/// DegenerateDataError when the within-group spread of the deviations is zero.
TestResult levene_test(const GroupedSample& sample, CenterKind kind,
                       Correction correction = Correction::None);

/// Levene-type F computed on an already-formed deviation set.
TestResult levene_from_deviations(const DeviationSet& dev, Correction correction);

/// Bartlett's M divided by its scaling constant
///   C = 1 + [sum 1/(n_i - 1) - 1/(N - k)] / (3(k - 1)),
/// referred to chi-squared(k - 1). The uncorrected M and C are reported in
/// details as "m_uncorrected" and "bartlett_c".
TestResult bartlett_m(const GroupedSample& sample);

/// Pooled kurtosis N * sum (x - xbar_i)^4 / [sum (x - xbar_i)^2]^2.
double kurtosis_estimate(const GroupedSample& sample);

/// Box-Anderson B3 = M * 2 / (g2 - 1) using the corrected M. Throws
/// KurtosisCorrectionError when g2 <= 1.
TestResult box_anderson_b3(const GroupedSample& sample);

}  // namespace levtest
