#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "levtest/data.hpp"
#include "levtest/spread.hpp"

namespace levtest {

/// Classical one-way ANOVA F referred to F(k - 1, N - k).
TestResult anova_f(const GroupedSample& sample);

/// Welch's heteroscedastic ANOVA with weights n_i / s_i^2, referred to
/// F(k - 1, f2*). Requires n_i >= 2 and positive group variances.
TestResult welch_anova(const GroupedSample& sample);

struct AdaptiveConfig {
  double preliminary_level = 0.15;
  CenterKind preliminary_center = CenterKind::median();
  Correction preliminary_correction = Correction::None;
};

enum class Branch { ClassicalF, Welch };

std::string_view to_string(Branch branch);

struct AdaptiveResult {
  TestResult preliminary;
  Branch chosen_branch = Branch::ClassicalF;
  TestResult final;
  std::vector<std::string> warnings;
};

/// Levene-type preliminary test, then Welch when its p-value is strictly
/// below the preliminary level and the classical F otherwise. A level outside
/// [0.15, 0.25] is allowed but noted in warnings; one outside [0, 1] throws
/// std::invalid_argument. A level of 0 always selects the classical F.
AdaptiveResult adaptive_anova(const GroupedSample& sample, const AdaptiveConfig& config = {});

}  // namespace levtest
