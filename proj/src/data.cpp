#include "levtest/data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "levtest/errors.hpp"

namespace levtest {

GroupedSample::GroupedSample(std::vector<Group> groups) : groups_(std::move(groups)) {
  if (groups_.size() < 2) throw std::invalid_argument("at least two groups are required");
  for (const Group& g : groups_) {
    if (g.values.empty()) throw std::invalid_argument("group '" + g.label + "' is empty");
    for (double v : g.values) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("group '" + g.label + "' contains a non-finite value");
      }
    }
  }
}

GroupedSample GroupedSample::from_values(std::vector<std::vector<double>> values) {
  std::vector<Group> groups;
  groups.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    groups.push_back({std::to_string(i + 1), std::move(values[i])});
  }
  return GroupedSample(std::move(groups));
}

std::size_t GroupedSample::total_size() const {
  std::size_t n = 0;
  for (const Group& g : groups_) n += g.values.size();
  return n;
}

CenterKind CenterKind::trimmed(double proportion) {
  if (!(proportion >= 0.0 && proportion < 0.5)) {
    throw std::invalid_argument("trim proportion must lie in [0, 0.5)");
  }
  return {Type::Trimmed, proportion};
}

std::string_view to_string(CenterKind::Type type) {
  switch (type) {
    case CenterKind::Type::Mean: return "mean";
    case CenterKind::Type::Median: return "median";
    case CenterKind::Type::Trimmed: return "trimmed";
  }
  return "unknown";
}

CenterKind parse_center(std::string_view name, double trim) {
  if (name == "mean") return CenterKind::mean();
  if (name == "median") return CenterKind::median();
  if (name == "trimmed") return CenterKind::trimmed(trim);
  throw std::invalid_argument("unknown center '" + std::string(name) + "'");
}

std::string_view to_string(Correction correction) {
  switch (correction) {
    case Correction::None: return "none";
    case Correction::HinesHines: return "hines-hines";
    case Correction::OBrien: return "obrien";
  }
  return "unknown";
}

Correction parse_correction(std::string_view name) {
  if (name == "none") return Correction::None;
  if (name == "hines-hines" || name == "hineshines") return Correction::HinesHines;
  if (name == "obrien" || name == "o'brien") return Correction::OBrien;
  throw std::invalid_argument("unknown correction '" + std::string(name) + "'");
}

std::size_t DeviationSet::total_size() const {
  std::size_t n = 0;
  for (const auto& g : z) n += g.size();
  return n;
}

double mean_of(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty set");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double variance_of(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("variance needs at least two values");
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return ss / static_cast<double>(values.size() - 1);
}

double center(std::span<const double> values, CenterKind kind) {
  if (values.empty()) throw std::invalid_argument("center of an empty set");
  if (kind.type == CenterKind::Type::Mean) return mean_of(values);

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (kind.type == CenterKind::Type::Median) {
    if (n % 2 == 1) return sorted[n / 2];
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  }
  if (!(kind.trim >= 0.0 && kind.trim < 0.5)) {
    throw std::invalid_argument("trim proportion must lie in [0, 0.5)");
  }
  const auto g = static_cast<std::size_t>(std::floor(kind.trim * static_cast<double>(n)));
  return mean_of(std::span<const double>(sorted).subspan(g, n - 2 * g));
}

DeviationSet deviations(const GroupedSample& sample, CenterKind kind) {
  DeviationSet dev;
  dev.center_kind = kind;
  dev.z.reserve(sample.k());
  dev.centers.reserve(sample.k());
  for (const Group& g : sample.groups()) {
    const double c = center(g.values, kind);
    std::vector<double> z;
    z.reserve(g.values.size());
    for (double x : g.values) z.push_back(std::fabs(x - c));
    dev.centers.push_back(c);
    dev.z.push_back(std::move(z));
  }
  return dev;
}

DeviationSet hines_hines_correct(DeviationSet dev) {
  if (dev.center_kind.type != CenterKind::Type::Median) {
    throw std::invalid_argument("Hines-Hines correction requires median centers");
  }
  if (dev.df_adjustment != 0) throw std::invalid_argument("deviations are already corrected");
  for (auto& z : dev.z) {
    if (z.size() < 2) {
      throw std::invalid_argument("Hines-Hines correction needs at least two values per group");
    }
    if (std::all_of(z.begin(), z.end(), [](double v) { return v == 0.0; })) {
      throw DegenerateDataError("Hines-Hines correction: a group has no positive spread");
    }
    if (z.size() % 2 == 1) {
      // The median is an observation, so its deviation is exactly zero.
      const auto zero = std::find(z.begin(), z.end(), 0.0);
      if (zero == z.end()) throw std::invalid_argument("odd-sized group has no structural zero");
      z.erase(zero);
    } else {
      // The two middle observations sit at equal, minimal distance from the median.
      auto first = std::min_element(z.begin(), z.end());
      const auto first_index = first - z.begin();
      double smallest = *first;
      *first = std::numeric_limits<double>::infinity();
      auto second = std::min_element(z.begin(), z.end());
      z[first_index] = std::numbers::sqrt2 * smallest;
      z.erase(second);
    }
  }
  dev.df_adjustment += static_cast<int>(dev.z.size());
  return dev;
}

DeviationSet obrien_scale(DeviationSet dev) {
  if (dev.scaled) throw std::invalid_argument("deviations are already scaled");
  for (auto& z : dev.z) {
    if (z.size() < 2) throw std::invalid_argument("O'Brien scaling needs at least two values per group");
    const double factor = 1.0 / std::sqrt(1.0 - 1.0 / static_cast<double>(z.size()));
    for (double& v : z) v *= factor;
  }
  dev.scaled = true;
  return dev;
}

double expected_mean_deviation(double sigma, std::size_t n) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (n == 0) throw std::invalid_argument("n must be at least 1");
  return sigma * std::sqrt(2.0 / std::numbers::pi * (1.0 - 1.0 / static_cast<double>(n)));
}

}  // namespace levtest
