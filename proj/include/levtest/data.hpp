#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace levtest {

struct Group {
  std::string label;
  std::vector<double> values;
};

/// k >= 2 labelled, nonempty groups of finite observations. Group order is
/// significant: trend tests read it as the ordering of the alternative.
class GroupedSample {
 public:
  /// Throws std::invalid_argument if the invariants do not hold.
  explicit GroupedSample(std::vector<Group> groups);

  /// Groups labelled "1", "2", ... in the given order.
  static GroupedSample from_values(std::vector<std::vector<double>> values);

  std::size_t k() const { return groups_.size(); }
  std::size_t total_size() const;
  std::span<const Group> groups() const { return groups_; }
  const Group& operator[](std::size_t i) const { return groups_[i]; }

 private:
  std::vector<Group> groups_;
};

/// Location estimate used to form absolute deviations.
struct CenterKind {
  enum class Type { Mean, Median, Trimmed };

  Type type = Type::Mean;
  /// Proportion trimmed from each end; only meaningful for Trimmed.
  double trim = 0.25;

  static CenterKind mean() { return {Type::Mean, 0.0}; }
  static CenterKind median() { return {Type::Median, 0.0}; }
  static CenterKind trimmed(double proportion = 0.25);

  bool operator==(const CenterKind&) const = default;
};

std::string_view to_string(CenterKind::Type type);
/// "mean", "median", "trimmed"; the trim proportion is supplied separately.
CenterKind parse_center(std::string_view name, double trim = 0.25);

enum class Correction { None, HinesHines, OBrien };

std::string_view to_string(Correction correction);
/// "none", "hines-hines", "obrien".
Correction parse_correction(std::string_view name);

/// Absolute deviations z_ij = |x_ij - center_i|, ragged like the sample.
struct DeviationSet {
  std::vector<std::vector<double>> z;
  /// center_i used for each group.
  std::vector<double> centers;
  CenterKind center_kind;
  /// Degrees of freedom removed by structural-zero corrections.
  int df_adjustment = 0;
  bool scaled = false;

  std::size_t total_size() const;
};

/// Mean, median (midpoint of the middle pair for even n) or trimmed mean
/// dropping floor(p * n) order statistics from each end.
double center(std::span<const double> values, CenterKind kind);

DeviationSet deviations(const GroupedSample& sample, CenterKind kind);

/// Removes the structural zero from each odd-sized group and merges the two
/// tied smallest deviations of each even-sized group into sqrt(2) times
/// their common value. Every group loses one value and df_adjustment grows
/// by k. Requires median centers and n_i >= 2; a group whose deviations are
/// all zero raises DegenerateDataError.
DeviationSet hines_hines_correct(DeviationSet dev);

/// Divides the deviations of group i by sqrt(1 - 1/n_i) so that they share
/// a common expectation under normality.
DeviationSet obrien_scale(DeviationSet dev);

/// Normal-theory E|x_ij - xbar_i| = sigma * sqrt((2/pi)(1 - 1/n)).
double expected_mean_deviation(double sigma, std::size_t n);

double mean_of(std::span<const double> values);
/// Unbiased sample variance (n - 1 denominator); requires n >= 2.
double variance_of(std::span<const double> values);

}  // namespace levtest
