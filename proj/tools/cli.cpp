#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "levtest/errors.hpp"
#include "levtest/format.hpp"

namespace levtest::cli {

using nlohmann::json;

// ---------------------------------------------------------------------------
// CSV input

namespace {

// Splits one CSV record; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw std::invalid_argument("line " + std::to_string(line_no) + ": unterminated quote");
  fields.emplace_back(trim(field));
  return fields;
}

}  // namespace

GroupedSample read_dataset(std::istream& in, const std::optional<std::vector<std::string>>& group_order) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    header = split_csv_line(line, line_no);
  }
  if (header.empty()) throw std::invalid_argument("input is empty; expected a header row");

  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("missing required column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t group_col = column("group");
  const std::size_t value_col = column("value");
  const std::size_t needed = std::max(group_col, value_col) + 1;

  std::vector<Group> groups;
  std::map<std::string, std::size_t> index;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line, line_no);
    if (fields.size() < needed) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected at least " +
                                  std::to_string(needed) + " fields");
    }
    const std::string& label = fields[group_col];
    if (label.empty()) throw std::invalid_argument("line " + std::to_string(line_no) + ": empty group label");
    double value = 0.0;
    try {
      value = parse_double(fields[value_col]);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": value '" + fields[value_col] +
                                  "' is not a number");
    }
    if (!std::isfinite(value)) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": value must be finite");
    }
    auto [it, inserted] = index.try_emplace(label, groups.size());
    if (inserted) groups.push_back({label, {}});
    groups[it->second].values.push_back(value);
  }

  if (group_order) {
    if (group_order->size() != groups.size()) {
      throw std::invalid_argument("--group-order lists " + std::to_string(group_order->size()) +
                                  " groups but the input has " + std::to_string(groups.size()));
    }
    std::vector<Group> ordered;
    ordered.reserve(groups.size());
    for (const std::string& label : *group_order) {
      const auto it = index.find(label);
      if (it == index.end()) throw std::invalid_argument("--group-order names unknown group '" + label + "'");
      if (groups[it->second].label.empty()) {
        throw std::invalid_argument("--group-order repeats group '" + label + "'");
      }
      ordered.push_back(std::move(groups[it->second]));
      groups[it->second].label.clear();
    }
    groups = std::move(ordered);
  }

  if (groups.size() < 2) throw std::invalid_argument("input must contain at least two groups");
  for (const Group& g : groups) {
    if (g.values.size() < 2) {
      throw std::invalid_argument("group '" + g.label + "' has fewer than two rows");
    }
  }
  return GroupedSample(std::move(groups));
}

// ---------------------------------------------------------------------------
// Reports

namespace {

json center_json(const std::optional<CenterKind>& c) {
  if (!c) return nullptr;
  return std::string(to_string(c->type));
}

json group_summaries(const GroupedSample& sample, const DeviationSet& dev, bool with_variance) {
  json groups = json::array();
  for (std::size_t i = 0; i < sample.k(); ++i) {
    json g = {{"label", sample[i].label},
              {"n", sample[i].values.size()},
              {"center", dev.centers[i]},
              {"deviation_mean", mean_of(dev.z[i])}};
    if (with_variance) {
      g["variance"] = sample[i].values.size() > 1 ? json(variance_of(sample[i].values)) : json(nullptr);
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace

json test_result_json(const TestResult& r) {
  json j = {{"method", r.method},
            {"statistic", r.statistic},
            {"df1", r.df1},
            {"df2", r.df2 ? json(*r.df2) : json(nullptr)},
            {"p_value", r.p_value},
            {"center", center_json(r.center)},
            {"correction", r.correction ? json(std::string(to_string(*r.correction))) : json(nullptr)}};
  if (r.center && r.center->type == CenterKind::Type::Trimmed) j["trim_proportion"] = r.center->trim;
  if (!r.details.empty()) {
    json details = json::object();
    for (const auto& [key, value] : r.details) details[key] = value;
    j["details"] = std::move(details);
  }
  return j;
}

json spread_report(const GroupedSample& sample, const TestResult& r, CenterKind kind,
                   Correction correction, const std::vector<std::string>& warnings) {
  json j = test_result_json(r);
  DeviationSet dev = deviations(sample, kind);
  if (correction == Correction::HinesHines) dev = hines_hines_correct(std::move(dev));
  if (correction == Correction::OBrien) dev = obrien_scale(std::move(dev));
  j["groups"] = group_summaries(sample, dev, !r.center.has_value());
  j["warnings"] = warnings;
  return j;
}

json trend_report(const GroupedSample& sample, const TrendResult& r, Side side,
                  const std::vector<std::string>& warnings) {
  json j = {{"method", "trend"},
            {"statistic", r.z_statistic},
            {"df1", nullptr},
            {"df2", nullptr},
            {"p_value", r.p_value(side)},
            {"center", std::string(to_string(r.center_kind.type))},
            {"correction", "none"},
            {"side", std::string(to_string(side))},
            {"beta_hat", r.beta_hat},
            {"std_error", r.std_error},
            {"z", r.z_statistic},
            {"p_increasing", r.p_one_sided_increasing},
            {"p_decreasing", r.p_one_sided_decreasing},
            {"p_two_sided", r.p_two_sided},
            {"scores", r.scores}};
  if (r.center_kind.type == CenterKind::Type::Trimmed) j["trim_proportion"] = r.center_kind.trim;
  j["groups"] = group_summaries(sample, deviations(sample, r.center_kind), false);
  j["warnings"] = warnings;
  return j;
}

json anova_report(const GroupedSample& sample, const TestResult& r, const std::vector<std::string>& warnings) {
  json j = test_result_json(r);
  j["groups"] = group_summaries(sample, deviations(sample, CenterKind::mean()), true);
  j["warnings"] = warnings;
  return j;
}

json adaptive_report(const GroupedSample& sample, const AdaptiveResult& r, const AdaptiveConfig& config) {
  json j = test_result_json(r.final);
  j["method"] = "adaptive";
  j["branch"] = std::string(to_string(r.chosen_branch));
  j["preliminary_level"] = config.preliminary_level;
  j["preliminary"] = test_result_json(r.preliminary);
  j["final"] = test_result_json(r.final);
  j["groups"] = group_summaries(sample, deviations(sample, CenterKind::mean()), true);
  j["warnings"] = r.warnings;
  return j;
}

namespace {

void flatten(const json& value, const std::string& path, std::ostringstream& out) {
  if (value.is_object()) {
    for (const auto& [key, child] : value.items()) {
      flatten(child, path.empty() ? key : path + "." + key, out);
    }
  } else if (value.is_array()) {
    if (value.empty()) {
      out << path << ": []\n";
      return;
    }
    for (std::size_t i = 0; i < value.size(); ++i) {
      flatten(value[i], path + "[" + std::to_string(i) + "]", out);
    }
  } else if (value.is_number_float()) {
    out << path << ": " << format_double(value.get<double>()) << '\n';
  } else if (value.is_string()) {
    out << path << ": " << value.get<std::string>() << '\n';
  } else {
    out << path << ": " << value.dump() << '\n';
  }
}

}  // namespace

std::string to_text(const json& report) {
  std::ostringstream out;
  flatten(report, "", out);
  return out.str();
}

// ---------------------------------------------------------------------------
// Scenario files and simulation reports

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), ',', ';');
  return split_trimmed(normalized, ';');
}

std::size_t parse_count(const std::string& text) {
  const double v = parse_double(text);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
    throw std::invalid_argument("'" + text + "' is not a nonnegative integer");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<Scenario> parse_scenario_file(std::istream& in) {
  std::vector<Scenario> scenarios;
  std::string line;
  std::size_t line_no = 0;
  bool open = false;

  auto finish = [&] {
    if (!open) return;
    Scenario& s = scenarios.back();
    if (s.mean_shifts.empty()) s.mean_shifts.assign(s.group_sizes.size(), 0.0);
    if (s.name.empty()) s.name = "scenario-" + std::to_string(s.index);
    s.validate();
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string content(trim(std::string_view(line).substr(0, hash)));
    if (content.empty()) continue;
    const std::string where = "scenario file line " + std::to_string(line_no) + ": ";
    try {
      if (content.front() == '[') {
        if (content.back() != ']' || content.substr(1, 8) != "scenario") {
          throw std::invalid_argument("expected a [scenario] header");
        }
        finish();
        Scenario s;
        s.index = scenarios.size();
        s.name = std::string(trim(std::string_view(content).substr(9, content.size() - 10)));
        scenarios.push_back(std::move(s));
        open = true;
        continue;
      }
      const auto eq = content.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("expected key = value");
      if (!open) throw std::invalid_argument("key outside a [scenario] section");
      const std::string key(trim(std::string_view(content).substr(0, eq)));
      const std::string value(trim(std::string_view(content).substr(eq + 1)));
      Scenario& s = scenarios.back();
      if (key == "name") {
        s.name = value;
      } else if (key == "distribution") {
        s.distribution.family = parse_family(value);
      } else if (key == "df" || key == "shape") {
        s.distribution.shape = parse_double(value);
      } else if (key == "location") {
        s.distribution.location = parse_double(value);
      } else if (key == "scale") {
        s.distribution.scale = parse_double(value);
      } else if (key == "group_sizes") {
        s.group_sizes.clear();
        for (const auto& v : split_list(value)) s.group_sizes.push_back(parse_count(v));
      } else if (key == "sigma_ratios") {
        s.sigma_ratios.clear();
        for (const auto& v : split_list(value)) s.sigma_ratios.push_back(parse_double(v));
      } else if (key == "mean_shifts") {
        s.mean_shifts.clear();
        for (const auto& v : split_list(value)) s.mean_shifts.push_back(parse_double(v));
      } else if (key == "nominal_level") {
        s.nominal_level = parse_double(value);
      } else if (key == "replications") {
        s.replications = parse_count(value);
      } else if (key == "test") {
        s.tests.push_back(TestSpec::parse(value));
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + e.what());
    }
  }
  finish();
  if (scenarios.empty()) throw std::invalid_argument("scenario file defines no scenarios");
  return scenarios;
}

const char* const kSimulationCsvHeader =
    "scenario_index,scenario,distribution,df,location,scale,group_sizes,sigma_ratios,mean_shifts,"
    "nominal_level,replications,master_seed,test,rejections,valid,error_count,rejection_rate,"
    "mc_standard_error";

void write_simulation_csv(std::ostream& out, const std::vector<SimulationReport>& reports) {
  out << kSimulationCsvHeader << '\n';
  for (const SimulationReport& rep : reports) {
    const Scenario& s = rep.scenario;
    std::vector<double> sizes(s.group_sizes.begin(), s.group_sizes.end());
    for (const TestTally& t : rep.tallies) {
      out << s.index << ',' << s.name << ',' << to_string(s.distribution.family) << ','
          << format_double(s.distribution.shape) << ',' << format_double(s.distribution.location) << ','
          << format_double(s.distribution.scale) << ',' << join_numbers(sizes) << ','
          << join_numbers(s.sigma_ratios) << ',' << join_numbers(s.mean_shifts) << ','
          << format_double(s.nominal_level) << ',' << s.replications << ',' << s.master_seed << ','
          << t.test << ',' << t.rejections << ',' << t.valid << ',' << t.errors << ','
          << format_double(t.rejection_rate) << ',' << format_double(t.mc_standard_error) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Commands

namespace {

struct InputOptions {
  std::string input;
  std::string group_order;
  std::string format = "json";
  double trim_proportion = 0.25;
};

void add_input_options(CLI::App* cmd, InputOptions& opts) {
  cmd->add_option("--input", opts.input, "CSV file with group,value columns ('-' for stdin)")->required();
  cmd->add_option("--group-order", opts.group_order, "Comma-separated group labels in trend order");
  cmd->add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--trim-proportion", opts.trim_proportion, "Proportion trimmed from each end")
      ->check(CLI::Range(0.0, 0.4999999));
}

GroupedSample load(const InputOptions& opts) {
  std::optional<std::vector<std::string>> order;
  if (!opts.group_order.empty()) order = split_trimmed(opts.group_order, ',');
  if (opts.input == "-") return read_dataset(std::cin, order);
  std::ifstream file(opts.input);
  if (!file) throw std::invalid_argument("cannot open input file '" + opts.input + "'");
  return read_dataset(file, order);
}

void emit(std::ostream& out, const json& report, const std::string& format) {
  if (format == "text") {
    out << to_text(report);
  } else {
    out << report.dump(2) << '\n';
  }
}

struct TestCommand {
  InputOptions in;
  std::string method = "levene";
  std::string center;
  std::string correction = "none";

  int run(std::ostream& out) const {
    const GroupedSample sample = load(in);
    std::vector<std::string> warnings;
    if (method == "bartlett" || method == "box-anderson") {
      if (!center.empty()) warnings.push_back("--center is ignored by " + method);
      if (correction != "none") warnings.push_back("--correction is ignored by " + method);
      const TestResult r = method == "bartlett" ? bartlett_m(sample) : box_anderson_b3(sample);
      emit(out, spread_report(sample, r, CenterKind::mean(), Correction::None, warnings), in.format);
      return kSuccess;
    }
    std::string center_name = center;
    if (method == "bfl") {
      if (!center.empty() && center != "median") throw std::invalid_argument("--method bfl implies --center median");
      center_name = "median";
    } else if (method == "trimmed") {
      if (!center.empty() && center != "trimmed") throw std::invalid_argument("--method trimmed implies --center trimmed");
      center_name = "trimmed";
    } else if (center_name.empty()) {
      center_name = "mean";
    }
    const CenterKind kind = parse_center(center_name, in.trim_proportion);
    const Correction corr = parse_correction(correction);
    const TestResult r = levene_test(sample, kind, corr);
    emit(out, spread_report(sample, r, kind, corr, warnings), in.format);
    return kSuccess;
  }
};

struct TrendCommand {
  InputOptions in;
  std::string scores;
  std::string center = "median";
  std::string side = "two-sided";

  int run(std::ostream& out) const {
    const GroupedSample sample = load(in);
    ScoreSet set = ScoreSet::linear(sample.k());
    if (!scores.empty()) {
      set.w.clear();
      for (const auto& s : split_trimmed(scores, ',')) set.w.push_back(parse_double(s));
    }
    const Side which = parse_side(side);
    const TrendResult r = trend_test(sample, set, parse_center(center, in.trim_proportion));
    emit(out, trend_report(sample, r, which, {}), in.format);
    return kSuccess;
  }
};

struct AnovaCommand {
  InputOptions in;
  std::string method = "classic";
  double prelim_level = 0.15;
  std::string prelim_center = "median";
  std::string prelim_correction = "none";

  int run(std::ostream& out) const {
    const GroupedSample sample = load(in);
    if (method == "classic") {
      emit(out, anova_report(sample, anova_f(sample), {}), in.format);
    } else if (method == "welch") {
      emit(out, anova_report(sample, welch_anova(sample), {}), in.format);
    } else {
      AdaptiveConfig config;
      config.preliminary_level = prelim_level;
      config.preliminary_center = parse_center(prelim_center, in.trim_proportion);
      config.preliminary_correction = parse_correction(prelim_correction);
      emit(out, adaptive_report(sample, adaptive_anova(sample, config), config), in.format);
    }
    return kSuccess;
  }
};

struct SimulateCommand {
  std::string grid;
  std::optional<std::uint64_t> seed;
  std::size_t reps = 10000;
  bool reps_given = false;
  unsigned workers = 0;
  std::string out_path;

  int run(std::ostream& out, std::ostream& err) const {
    const std::uint64_t master_seed = seed ? *seed : [] {
      std::random_device rd;
      return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }();
    std::vector<Scenario> scenarios;
    if (grid == "table1") {
      scenarios = table1_grid(master_seed, reps);
    } else if (grid == "power-ordering") {
      scenarios = power_ordering_grid(
          {CenterKind::mean(), CenterKind::median(), CenterKind::trimmed(0.25)}, master_seed, reps);
    } else {
      std::ifstream file(grid);
      if (!file) throw std::invalid_argument("unknown grid '" + grid + "' (not table1, power-ordering, or a readable file)");
      scenarios = parse_scenario_file(file);
      for (Scenario& s : scenarios) {
        s.master_seed = master_seed;
        if (reps_given) s.replications = reps;
      }
    }

    std::ofstream file_out;
    std::ostream* sink = &out;
    if (!out_path.empty() && out_path != "-") {
      file_out.open(out_path, std::ios::binary);
      if (!file_out) throw std::invalid_argument("cannot write output file '" + out_path + "'");
      sink = &file_out;
    }
    const auto reports = run_grid(scenarios, workers);
    write_simulation_csv(*sink, reports);
    sink->flush();
    if (!*sink) throw std::invalid_argument("failed writing output '" + out_path + "'");

    double elapsed = 0.0;
    for (const auto& r : reports) elapsed += r.elapsed.count();
    err << "levtest simulate: " << reports.size() << " scenarios, seed " << master_seed << ", "
        << format_double(std::round(elapsed * 1000.0) / 1000.0) << " s\n";
    return kSuccess;
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Levene-type variance tests, Welch and adaptive ANOVA, and Monte Carlo size/power studies"};
  app.name("levtest");
  app.require_subcommand(1);

  TestCommand test_cmd;
  auto* test = app.add_subcommand("test", "Homogeneity-of-variance test");
  add_input_options(test, test_cmd.in);
  test->add_option("--method", test_cmd.method)
      ->check(CLI::IsMember({"levene", "bfl", "trimmed", "bartlett", "box-anderson"}));
  test->add_option("--center", test_cmd.center)->check(CLI::IsMember({"mean", "median", "trimmed"}));
  test->add_option("--correction", test_cmd.correction)
      ->check(CLI::IsMember({"none", "hines-hines", "obrien"}));

  TrendCommand trend_cmd;
  auto* trend = app.add_subcommand("trend", "Levene-type trend test on group spreads");
  add_input_options(trend, trend_cmd.in);
  trend->add_option("--scores", trend_cmd.scores, "Comma-separated scores, one per group (default 1..k)");
  trend->add_option("--center", trend_cmd.center)->check(CLI::IsMember({"mean", "median", "trimmed"}));
  trend->add_option("--side", trend_cmd.side)
      ->check(CLI::IsMember({"increasing", "decreasing", "two-sided"}));

  AnovaCommand anova_cmd;
  auto* anova = app.add_subcommand("anova", "Test equality of group means");
  add_input_options(anova, anova_cmd.in);
  anova->add_option("--method", anova_cmd.method)->check(CLI::IsMember({"classic", "welch", "adaptive"}));
  anova->add_option("--prelim-level", anova_cmd.prelim_level)->check(CLI::Range(0.0, 1.0));
  anova->add_option("--prelim-center", anova_cmd.prelim_center)
      ->check(CLI::IsMember({"mean", "median", "trimmed"}));
  anova->add_option("--prelim-correction", anova_cmd.prelim_correction)
      ->check(CLI::IsMember({"none", "hines-hines", "obrien"}));

  SimulateCommand sim_cmd;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo size/power grid");
  simulate->add_option("--grid", sim_cmd.grid, "table1, power-ordering, or a scenario file")->required();
  simulate->add_option("--seed", sim_cmd.seed, "Master seed (random and recorded when omitted)");
  auto* reps_opt = simulate->add_option("--reps", sim_cmd.reps, "Replications per scenario")
                       ->check(CLI::Range(std::size_t{1}, std::size_t{0xFFFFFFFF}));
  simulate->add_option("--workers", sim_cmd.workers, "Worker threads (0 = hardware concurrency)");
  simulate->add_option("--out", sim_cmd.out_path, "Output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kInputError;
  }

  try {
    if (test->parsed()) return test_cmd.run(out);
    if (trend->parsed()) return trend_cmd.run(out);
    if (anova->parsed()) return anova_cmd.run(out);
    sim_cmd.reps_given = reps_opt->count() > 0;
    return sim_cmd.run(out, err);
  } catch (const DegenerateDataError& e) {
    err << "levtest: degenerate data: " << e.what() << '\n';
    return kDegenerate;
  } catch (const std::invalid_argument& e) {
    err << "levtest: " << e.what() << '\n';
    return kInputError;
  } catch (const std::domain_error& e) {
    err << "levtest: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace levtest::cli
