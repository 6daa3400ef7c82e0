#include "levtest/trend.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "levtest/numerics.hpp"
#include "levtest/oneway.hpp"

namespace levtest {

ScoreSet ScoreSet::linear(std::size_t k) {
  ScoreSet s;
  s.w.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) s.w.push_back(static_cast<double>(i));
  return s;
}

void ScoreSet::validate(std::size_t k) const {
  if (w.size() != k) {
    throw std::invalid_argument("expected " + std::to_string(k) + " scores, got " +
                                std::to_string(w.size()));
  }
  for (double v : w) {
    if (!std::isfinite(v)) throw std::invalid_argument("scores must be finite");
  }
  std::vector<double> sorted = w;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("scores must be distinct; merge the tied groups explicitly");
  }
}

std::string_view to_string(Side side) {
  switch (side) {
    case Side::Increasing: return "increasing";
    case Side::Decreasing: return "decreasing";
    case Side::TwoSided: return "two-sided";
  }
  return "unknown";
}

Side parse_side(std::string_view name) {
  if (name == "increasing") return Side::Increasing;
  if (name == "decreasing") return Side::Decreasing;
  if (name == "two-sided") return Side::TwoSided;
  throw std::invalid_argument("unknown side '" + std::string(name) + "'");
}

double TrendResult::p_value(Side side) const {
  switch (side) {
    case Side::Increasing: return p_one_sided_increasing;
    case Side::Decreasing: return p_one_sided_decreasing;
    case Side::TwoSided: return p_two_sided;
  }
  return p_two_sided;
}

TrendResult trend_test(const GroupedSample& sample, const ScoreSet& scores, CenterKind kind) {
  scores.validate(sample.k());
  const DeviationSet dev = deviations(sample, kind);
  const OneWayTable table = one_way_anova(dev.z);

  const double n_total = static_cast<double>(sample.total_size());
  double w_bar = 0.0;
  for (std::size_t i = 0; i < sample.k(); ++i) {
    w_bar += static_cast<double>(dev.z[i].size()) * scores.w[i];
  }
  w_bar /= n_total;

  double z_grand = 0.0;
  for (double m : table.group_means) z_grand += m;
  z_grand /= static_cast<double>(sample.k());

  double numerator = 0.0;
  double denominator = 0.0;
  for (std::size_t i = 0; i < sample.k(); ++i) {
    const double n_i = static_cast<double>(dev.z[i].size());
    const double dw = scores.w[i] - w_bar;
    numerator += n_i * dw * (table.group_means[i] - z_grand);
    denominator += n_i * dw * dw;
  }

  TrendResult r;
  r.center_kind = kind;
  r.scores = scores.w;
  r.beta_hat = numerator / denominator;
  const double pooled_var = table.within_ss / table.df2;
  r.std_error = std::sqrt(pooled_var / denominator);
  r.z_statistic = r.beta_hat / r.std_error;
  r.p_one_sided_increasing = std_normal_sf(r.z_statistic);
  r.p_one_sided_decreasing = std_normal_sf(-r.z_statistic);
  r.p_two_sided =
      std::min(1.0, 2.0 * std::min(r.p_one_sided_increasing, r.p_one_sided_decreasing));
  return r;
}

}  // namespace levtest
