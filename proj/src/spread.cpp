#include "levtest/spread.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "levtest/errors.hpp"
#include "levtest/numerics.hpp"
#include "levtest/oneway.hpp"

namespace levtest {

std::optional<double> TestResult::detail(const std::string& name) const {
  for (const auto& [key, value] : details) {
    if (key == name) return value;
  }
  return std::nullopt;
}

namespace {

void require_group_size(const GroupedSample& sample, std::size_t minimum, const char* what) {
  for (const Group& g : sample.groups()) {
    if (g.values.size() < minimum) {
      throw std::invalid_argument(std::string(what) + ": group '" + g.label + "' has " +
                                  std::to_string(g.values.size()) + " observations, needs " +
                                  std::to_string(minimum));
    }
  }
}

void require_spread(const GroupedSample& sample) {
  for (const Group& g : sample.groups()) {
    const auto [lo, hi] = std::minmax_element(g.values.begin(), g.values.end());
    if (*lo == *hi) {
      throw DegenerateDataError("group '" + g.label + "' has zero variance");
    }
  }
}

}  // namespace

TestResult levene_from_deviations(const DeviationSet& dev, Correction correction) {
  const OneWayTable table = one_way_anova(dev.z);
  TestResult r;
  r.method = "levene";
  r.statistic = table.f;
  r.df1 = table.df1;
  r.df2 = table.df2;
  r.p_value = f_sf(table.f, table.df1, table.df2);
  r.center = dev.center_kind;
  r.correction = correction;
  return r;
}

TestResult levene_test(const GroupedSample& sample, CenterKind kind, Correction correction) {
  DeviationSet dev = deviations(sample, kind);
  switch (correction) {
    case Correction::None:
      require_group_size(sample, 2, "levene_test");
      break;
    case Correction::HinesHines:
      if (kind.type != CenterKind::Type::Median) {
        throw std::invalid_argument("Hines-Hines correction requires median centers");
      }
      require_group_size(sample, 3, "levene_test with Hines-Hines correction");
      dev = hines_hines_correct(std::move(dev));
      break;
    case Correction::OBrien:
      require_group_size(sample, 2, "levene_test");
      dev = obrien_scale(std::move(dev));
      break;
  }
  return levene_from_deviations(dev, correction);
}

TestResult bartlett_m(const GroupedSample& sample) {
  require_group_size(sample, 2, "bartlett_m");
  require_spread(sample);
  const double k = static_cast<double>(sample.k());
  const double n_total = static_cast<double>(sample.total_size());
  double pooled_ss = 0.0;
  double sum_log = 0.0;
  double sum_inv_df = 0.0;
  for (const Group& g : sample.groups()) {
    const double df = static_cast<double>(g.values.size() - 1);
    const double var = variance_of(g.values);
    pooled_ss += df * var;
    sum_log += df * std::log(var);
    sum_inv_df += 1.0 / df;
  }
  const double df_within = n_total - k;
  const double pooled = pooled_ss / df_within;
  // Jensen: M >= 0 mathematically; clamp rounding below zero.
  const double m = std::max(0.0, df_within * std::log(pooled) - sum_log);
  const double c = 1.0 + (sum_inv_df - 1.0 / df_within) / (3.0 * (k - 1.0));

  TestResult r;
  r.method = "bartlett";
  r.statistic = m / c;
  r.df1 = k - 1.0;
  r.p_value = chi_sq_sf(r.statistic, r.df1);
  r.details = {{"m_uncorrected", m}, {"bartlett_c", c}};
  return r;
}

double kurtosis_estimate(const GroupedSample& sample) {
  double sum2 = 0.0;
  double sum4 = 0.0;
  for (const Group& g : sample.groups()) {
    const double m = mean_of(g.values);
    for (double x : g.values) {
      const double d2 = (x - m) * (x - m);
      sum2 += d2;
      sum4 += d2 * d2;
    }
  }
  if (!(sum2 > 0.0)) {
    throw DegenerateDataError("kurtosis undefined: every observation equals its group mean");
  }
  return static_cast<double>(sample.total_size()) * sum4 / (sum2 * sum2);
}

TestResult box_anderson_b3(const GroupedSample& sample) {
  TestResult r = bartlett_m(sample);
  const double kurt = kurtosis_estimate(sample);
  if (!(kurt > 1.0)) {
    throw KurtosisCorrectionError("Box-Anderson correction undefined: pooled kurtosis " +
                                  std::to_string(kurt) + " is not above 1");
  }
  const double factor = 2.0 / (kurt - 1.0);
  const double corrected_m = r.statistic;
  r.method = "box-anderson";
  r.statistic = corrected_m * factor;
  r.p_value = chi_sq_sf(r.statistic, r.df1);
  r.details.emplace_back("m_corrected", corrected_m);
  r.details.emplace_back("kurtosis", kurt);
  r.details.emplace_back("kurtosis_factor", factor);
  return r;
}

}  // namespace levtest
