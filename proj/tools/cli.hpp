#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "levtest/means.hpp"
#include "levtest/sim.hpp"
#include "levtest/spread.hpp"
#include "levtest/trend.hpp"

namespace levtest::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kSuccess = 0, kInputError = 2, kDegenerate = 3 };

/// Reads long-format CSV with a header naming `group` and `value` columns
/// (any order, extra columns ignored). Groups are ordered by first
/// appearance, or by `group_order` when given, which must then list every
/// group exactly once. Throws std::invalid_argument with a line number on
/// malformed input, or when fewer than two groups or a group with fewer than
/// two rows is present.
GroupedSample read_dataset(std::istream& in,
                           const std::optional<std::vector<std::string>>& group_order = std::nullopt);

nlohmann::json test_result_json(const TestResult& r);

/// Full report for a homogeneity test: the result, per-group summaries
/// computed with `kind` (and `correction`), and warnings.
nlohmann::json spread_report(const GroupedSample& sample, const TestResult& r, CenterKind kind,
                             Correction correction, const std::vector<std::string>& warnings);

nlohmann::json trend_report(const GroupedSample& sample, const TrendResult& r, Side side,
                            const std::vector<std::string>& warnings);

nlohmann::json anova_report(const GroupedSample& sample, const TestResult& r,
                            const std::vector<std::string>& warnings);

nlohmann::json adaptive_report(const GroupedSample& sample, const AdaptiveResult& r,
                               const AdaptiveConfig& config);

/// Renders a report as "key: value" lines; nested fields use dotted paths
/// and array indices, e.g. "groups[0].label: a".
std::string to_text(const nlohmann::json& report);

/// Scenario file: '#' comments, "[scenario]" headers, and key = value lines
/// (name, distribution, df, location, scale, group_sizes, sigma_ratios,
/// mean_shifts, nominal_level, replications, test). `test` may repeat; list
/// values are separated by ',' or ';'. Scenarios are indexed in file order.
std::vector<Scenario> parse_scenario_file(std::istream& in);

/// Header of the simulation CSV report.
extern const char* const kSimulationCsvHeader;

/// One row per (scenario, test); list-valued fields are ';'-joined.
void write_simulation_csv(std::ostream& out, const std::vector<SimulationReport>& reports);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace levtest::cli
