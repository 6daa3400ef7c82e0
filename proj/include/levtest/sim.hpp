#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "levtest/data.hpp"
#include "levtest/means.hpp"
#include "levtest/numerics.hpp"
#include "levtest/trend.hpp"

namespace levtest {

/// A test applied to each simulated dataset.
struct TestSpec {
  enum class Kind { Anova, Welch, Adaptive, Levene, Trend, Bartlett, BoxAnderson };

  Kind kind = Kind::Anova;
  /// Levene and trend centers.
  CenterKind center = CenterKind::median();
  Correction correction = Correction::None;
  /// Adaptive preliminary test.
  AdaptiveConfig adaptive;
  /// Trend scores; empty means linear 1..k.
  std::vector<double> scores;
  Side side = Side::Increasing;

  static TestSpec anova() { return {}; }
  static TestSpec welch();
  static TestSpec adaptive_anova(AdaptiveConfig config = {});
  static TestSpec levene(CenterKind center, Correction correction = Correction::None);
  static TestSpec trend(CenterKind center, Side side = Side::Increasing,
                        std::vector<double> scores = {});
  static TestSpec bartlett();
  static TestSpec box_anderson();

  /// Stable identifier used in reports, e.g. "levene:center=median:correction=none".
  /// Options are colon-separated key=value pairs; score lists use ';'.
  std::string id() const;

  /// Inverse of id(). Omitted options take their defaults. Throws
  /// std::invalid_argument on unknown names or options.
  static TestSpec parse(std::string_view text);

  /// p-value of this test on `sample`. Throws what the underlying test throws.
  double p_value(const GroupedSample& sample) const;
};

std::string_view to_string(TestSpec::Kind kind);
TestSpec::Kind parse_test_kind(std::string_view name);

struct Scenario {
  std::string name;
  /// Index within its grid; part of the per-replicate seed derivation.
  std::uint64_t index = 0;
  DistributionSpec distribution;
  std::vector<std::size_t> group_sizes;
  /// Multipliers applied to the raw variate of each group.
  std::vector<double> sigma_ratios;
  /// Added after scaling; all zero for size studies.
  std::vector<double> mean_shifts;
  std::vector<TestSpec> tests;
  double nominal_level = 0.05;
  std::size_t replications = 10000;
  std::uint64_t master_seed = 0;

  /// Throws std::invalid_argument if the scenario is malformed.
  void validate() const;
};

struct TestTally {
  std::string test;
  std::size_t rejections = 0;
  /// Replicates on which the test produced a p-value.
  std::size_t valid = 0;
  /// Replicates on which the test raised a degenerate-data error.
  std::size_t errors = 0;
  double rejection_rate = 0.0;
  /// sqrt(r (1 - r) / valid).
  double mc_standard_error = 0.0;
};

struct SimulationReport {
  Scenario scenario;
  std::vector<TestTally> tallies;
  std::chrono::duration<double> elapsed{};

  const TestTally& tally(const std::string& test_id) const;
};

/// Stream id of replicate `replicate` of scenario `scenario_index`.
std::uint64_t replicate_stream_id(std::uint64_t scenario_index, std::uint64_t replicate);

/// Draws the dataset for one replicate: group i holds group_sizes[i] draws of
/// mean_shifts[i] + sigma_ratios[i] * X with X from the scenario distribution.
GroupedSample simulate_dataset(const Scenario& s, std::uint64_t replicate);

/// Runs every configured test on `replications` datasets. The result depends
/// only on the scenario (including its seed and index), never on `workers`;
/// 0 workers means one per hardware thread.
SimulationReport run_scenario(const Scenario& s, unsigned workers = 0);

std::vector<SimulationReport> run_grid(const std::vector<Scenario>& grid, unsigned workers = 0);

/// Normal data, group sizes {10,10,10}, {10,10,20}, {10,20,10}, {20,10,10}
/// crossed with sigma ratios 1:1:1, 1:2:3, 1:3:5; each scenario runs the
/// classical F, Welch, and adaptive (median Levene at 15%) tests.
std::vector<Scenario> table1_grid(std::uint64_t master_seed = 0, std::size_t replications = 10000);

/// Trend versus homogeneity under increasing spread: normal, exponential,
/// t3 and chi-squared(3) data; n_i in {5, 10, 20}; sigma ratios 1:1:1, 1:2:3,
/// 1:3:5; for each center a Levene test and an increasing linear-score trend
/// test.
std::vector<Scenario> power_ordering_grid(const std::vector<CenterKind>& centers,
                                          std::uint64_t master_seed = 0,
                                          std::size_t replications = 10000);

std::vector<SimulationReport> power_ordering_study(CenterKind center, std::uint64_t master_seed = 0,
                                                   std::size_t replications = 10000,
                                                   unsigned workers = 0);

}  // namespace levtest
