#include "levtest/means.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "levtest/errors.hpp"
#include "levtest/numerics.hpp"
#include "levtest/oneway.hpp"

namespace levtest {

namespace {

std::vector<std::vector<double>> values_of(const GroupedSample& sample) {
  std::vector<std::vector<double>> out;
  out.reserve(sample.k());
  for (const Group& g : sample.groups()) out.push_back(g.values);
  return out;
}

}  // namespace

std::string_view to_string(Branch branch) {
  return branch == Branch::Welch ? "welch" : "classic";
}

TestResult anova_f(const GroupedSample& sample) {
  const OneWayTable table = one_way_anova(values_of(sample));
  TestResult r;
  r.method = "anova";
  r.statistic = table.f;
  r.df1 = table.df1;
  r.df2 = table.df2;
  r.p_value = f_sf(table.f, table.df1, table.df2);
  return r;
}

TestResult welch_anova(const GroupedSample& sample) {
  const std::size_t k = sample.k();
  std::vector<double> weights(k);
  std::vector<double> means(k);
  std::vector<double> dfs(k);
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const Group& g = sample[i];
    if (g.values.size() < 2) {
      throw std::invalid_argument("welch_anova: group '" + g.label + "' needs at least 2 observations");
    }
    const auto [lo, hi] = std::minmax_element(g.values.begin(), g.values.end());
    if (*lo == *hi) throw DegenerateDataError("group '" + g.label + "' has zero variance");
    const double n = static_cast<double>(g.values.size());
    means[i] = mean_of(g.values);
    weights[i] = n / variance_of(g.values);
    dfs[i] = n - 1.0;
    weight_sum += weights[i];
  }

  double weighted_mean = 0.0;
  for (std::size_t i = 0; i < k; ++i) weighted_mean += weights[i] * means[i];
  weighted_mean /= weight_sum;

  double between = 0.0;
  double lambda = 0.0;  // sum (1 - w_i/W)^2 / f_i
  for (std::size_t i = 0; i < k; ++i) {
    between += weights[i] * (means[i] - weighted_mean) * (means[i] - weighted_mean);
    const double h = 1.0 - weights[i] / weight_sum;
    lambda += h * h / dfs[i];
  }
  const double kd = static_cast<double>(k);
  const double k2m1 = kd * kd - 1.0;
  const double numerator = between / (kd - 1.0);
  const double denominator = 1.0 + 2.0 * (kd - 2.0) / k2m1 * lambda;

  TestResult r;
  r.method = "welch";
  r.statistic = numerator / denominator;
  r.df1 = kd - 1.0;
  r.df2 = 1.0 / (3.0 / k2m1 * lambda);
  r.p_value = f_sf(r.statistic, r.df1, *r.df2);
  r.details = {{"weighted_grand_mean", weighted_mean}};
  return r;
}

AdaptiveResult adaptive_anova(const GroupedSample& sample, const AdaptiveConfig& config) {
  const double level = config.preliminary_level;
  if (!(level >= 0.0 && level <= 1.0)) {
    throw std::invalid_argument("preliminary level must lie in [0, 1]");
  }
  AdaptiveResult r;
  if (level < 0.15 || level > 0.25) {
    std::ostringstream msg;
    msg << "preliminary level " << level << " is outside the recommended range 15% to 25%";
    r.warnings.push_back(msg.str());
  }
  r.preliminary = levene_test(sample, config.preliminary_center, config.preliminary_correction);
  if (r.preliminary.p_value < level) {
    r.chosen_branch = Branch::Welch;
    r.final = welch_anova(sample);
  } else {
    r.chosen_branch = Branch::ClassicalF;
    r.final = anova_f(sample);
  }
  return r;
}

}  // namespace levtest
