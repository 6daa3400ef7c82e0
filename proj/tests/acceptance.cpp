// Acceptance suite: one PASS/FAIL line per criterion; nonzero exit if any fail.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cli.hpp"
#include "levtest/format.hpp"
#include "levtest/means.hpp"
#include "levtest/numerics.hpp"
#include "levtest/sim.hpp"
#include "levtest/spread.hpp"
#include "levtest/trend.hpp"

using namespace levtest;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Check {
  bool ok = true;
  std::string note;
  std::string failure;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      failure = what;
      ok = false;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::string run_cli(std::vector<std::string> args, int& code) {
  args.insert(args.begin(), "levtest");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return out.str();
}

// scenario name -> test id -> rejection rate
std::map<std::string, std::map<std::string, double>> parse_sim_csv(const std::string& csv) {
  std::map<std::string, std::map<std::string, double>> rates;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto f = split_trimmed(line, ',');
    if (f.size() < 18) continue;
    rates[f[1]][f[12]] = parse_double(f[16]);
  }
  return rates;
}

// Rows: layouts; columns: sigma 1:1:1, 1:2:3, 1:3:5.
struct PublishedRow {
  const char* layout;
  double anova[3], welch[3], adaptive[3];
};

const PublishedRow kTable1[] = {
    {"10-10-10", {.0481, .0665, .0665}, {.0485, .0518, .0530}, {.0496, .0572, .0539}},
    {"10-10-20", {.0512, .0264, .0230}, {.0514, .0524, .0529}, {.0546, .0514, .0529}},
    {"10-20-10", {.0491, .0714, .0867}, {.0494, .0495, .0524}, {.0523, .0554, .0528}},
    {"20-10-10", {.0542, .1212, .1399}, {.0557, .0506, .0515}, {.0572, .0564, .0520}},
};
const char* const kRatios[] = {"1:1:1", "1:2:3", "1:3:5"};

Check criterion1() {
  Check c;
  int code = 0;
  const auto csv = run_cli({"simulate", "--grid", "table1", "--reps", "10000", "--seed", std::to_string(kSeed)}, code);
  c.require(code == 0, "simulate failed");
  const auto rates = parse_sim_csv(csv);
  int within = 0, cells = 0;
  double worst = 0;
  for (const auto& row : kTable1) {
    for (int j = 0; j < 3; ++j) {
      const std::string name = std::string("table1/n=") + row.layout + "/sigma=" + kRatios[j];
      const std::pair<const char*, double> refs[] = {
          {"anova", row.anova[j]},
          {"welch", row.welch[j]},
          {"adaptive:level=0.15:center=median:correction=none", row.adaptive[j]}};
      for (const auto& [test, ref] : refs) {
        ++cells;
        const auto it = rates.find(name);
        if (it == rates.end() || !it->second.count(test)) {
          c.require(false, "missing cell " + name + " " + test);
          continue;
        }
        const double got = it->second.at(test);
        const double se = std::sqrt(ref * (1 - ref) / 10000.0);
        const double z = std::fabs(got - ref) / se;
        worst = std::max(worst, z);
        if (z <= 3.0) {
          ++within;
        } else {
          std::printf("  criterion 1 cell %s %s: %.4f vs %.4f (%.2f SE)\n", name.c_str(), test, got, ref, z);
        }
        c.require(z <= 3.0, "cell outside 3 SE");
      }
    }
  }
  c.note = fmt("%.0f/%.0f cells within 3 SE, largest deviation %.2f SE", within, cells, worst);
  return c;
}

Check criterion2() {
  Check c;
  RngStream rng(kSeed, 2);
  double worst_f = 0, worst_df = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<double>> g(2);
    for (auto& v : g) {
      const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 30);
      const double sd = 0.1 + 10 * rng.uniform();
      const double mu = 3 * rng.normal();
      for (std::size_t i = 0; i < n; ++i) v.push_back(mu + sd * rng.normal());
    }
    long double m[2], v[2];
    for (int i = 0; i < 2; ++i) {
      long double s = 0;
      for (double x : g[i]) s += x;
      m[i] = s / g[i].size();
      long double ss = 0;
      for (double x : g[i]) ss += (x - m[i]) * (x - m[i]);
      v[i] = ss / (g[i].size() - 1) / g[i].size();
    }
    const long double t2 = (m[0] - m[1]) * (m[0] - m[1]) / (v[0] + v[1]);
    const long double df =
        (v[0] + v[1]) * (v[0] + v[1]) / (v[0] * v[0] / (g[0].size() - 1) + v[1] * v[1] / (g[1].size() - 1));
    const auto r = welch_anova(GroupedSample::from_values(g));
    const double ef = std::fabs(r.statistic - static_cast<double>(t2)) / std::max(1.0, static_cast<double>(t2));
    const double edf = std::fabs(*r.df2 - static_cast<double>(df)) / static_cast<double>(df);
    worst_f = std::max(worst_f, ef);
    worst_df = std::max(worst_df, edf);
  }
  c.require(worst_f <= 1e-12 && worst_df <= 1e-12, "mismatch");
  c.note = fmt("200 datasets, max rel. error F %.1e, df %.1e", worst_f, worst_df);
  return c;
}

Check criterion3() {
  Check c;
  const auto s = GroupedSample::from_values({{1, 2, 3}, {2, 4, 6}});
  const auto lev = levene_test(s, CenterKind::mean());
  const auto f = anova_f(s);
  c.require(std::fabs(lev.statistic - 0.8) <= 1e-12, "levene F");
  c.require(lev.df1 == 1.0 && lev.df2 && *lev.df2 == 4.0, "levene df");
  c.require(std::fabs(f.statistic - 2.4) <= 1e-12, "anova F");
  c.note = "levene F = " + format_double(lev.statistic) + " df (" + format_double(lev.df1) + "," +
           format_double(*lev.df2) + "), anova F = " + format_double(f.statistic);
  return c;
}

Scenario base_scenario(std::string name, std::uint64_t index, DistributionSpec dist, std::size_t n,
                       std::vector<double> ratios) {
  Scenario s;
  s.name = std::move(name);
  s.index = index;
  s.distribution = dist;
  s.group_sizes = {n, n, n};
  s.sigma_ratios = std::move(ratios);
  s.mean_shifts = {0, 0, 0};
  s.replications = 10000;
  s.master_seed = kSeed;
  return s;
}

Check criterion4() {
  Check c;
  std::string detail;
  std::uint64_t index = 0;
  for (const auto& ratios : {std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 5}}) {
    auto s = base_scenario("power", index++, {}, 10, ratios);
    for (auto kind : {CenterKind::mean(), CenterKind::median(), CenterKind::trimmed()}) {
      s.tests.push_back(TestSpec::levene(kind));
      s.tests.push_back(TestSpec::trend(kind, Side::Increasing));
    }
    const auto r = run_scenario(s);
    for (std::size_t i = 0; i < s.tests.size(); i += 2) {
      const auto& lev = r.tallies[i];
      const auto& tr = r.tallies[i + 1];
      const double margin = 3 * std::hypot(lev.mc_standard_error, tr.mc_standard_error);
      const bool ok = tr.rejection_rate - lev.rejection_rate > margin;
      c.require(ok, "trend not above levene");
      detail += fmt(" %.4f>%.4f", tr.rejection_rate, lev.rejection_rate);
      if (!ok) {
        std::printf("  criterion 4 %s vs %s: %.4f vs %.4f, margin %.4f\n", tr.test.c_str(), lev.test.c_str(),
                    tr.rejection_rate, lev.rejection_rate, margin);
      }
    }
  }
  c.note = "trend>levene (mean, median, trimmed; 1:2:3 then 1:3:5):" + detail;
  return c;
}

Check criterion5() {
  Check c;
  auto normal = base_scenario("small/normal", 0, {}, 5, {1, 1, 1});
  normal.tests = {TestSpec::levene(CenterKind::median()),
                  TestSpec::levene(CenterKind::median(), Correction::HinesHines)};
  DistributionSpec chisq{Family::ChiSquared, 0, 1, 3};
  auto skewed = base_scenario("small/chisq3", 1, chisq, 5, {1, 1, 1});
  skewed.tests = {TestSpec::levene(CenterKind::mean())};
  const auto rn = run_scenario(normal);
  const auto rs = run_scenario(skewed);
  const auto& med = rn.tallies[0];
  const auto& hh = rn.tallies[1];
  const auto& mean = rs.tallies[0];
  c.require(0.05 - med.rejection_rate > 3 * med.mc_standard_error, "median size not below nominal");
  c.require(std::fabs(hh.rejection_rate - 0.05) < std::fabs(med.rejection_rate - 0.05), "Hines-Hines not closer");
  c.require(mean.rejection_rate - 0.05 > 3 * mean.mc_standard_error, "mean size under chisq3 not above nominal");
  c.note = fmt("median %.4f, Hines-Hines %.4f", med.rejection_rate, hh.rejection_rate) +
           fmt(", mean-center under chisq3 %.4f", mean.rejection_rate);
  return c;
}

Check criterion6() {
  Check c;
  RngStream rng(kSeed, 6);
  int kept = 0, drawn = 0;
  double largest_ratio = 0;
  while (kept < 1000) {
    ++drawn;
    std::vector<std::vector<double>> g(3);
    for (auto& v : g) {
      for (int i = 0; i < 10; ++i) v.push_back(rng.student_t(3));
    }
    const auto s = GroupedSample::from_values(g);
    if (kurtosis_estimate(s) <= 3.0) continue;
    ++kept;
    const auto b3 = box_anderson_b3(s);
    const double m = *b3.detail("m_uncorrected");
    c.require(b3.statistic < m, "B3 >= M");
    largest_ratio = std::max(largest_ratio, b3.statistic / m);
  }
  c.note = fmt("%.0f datasets (of %.0f drawn), max B3/M %.4f", kept, drawn, largest_ratio);
  return c;
}

Check criterion7() {
  Check c;
  std::ifstream in(std::string(LEVTEST_TEST_DATA_DIR) + "/special_oracle.csv");
  c.require(in.good(), "oracle file missing");
  std::string line;
  std::getline(in, line);
  std::map<std::string, int> counts;
  double worst = 0;
  while (std::getline(in, line)) {
    const auto f = split_trimmed(line, ',');
    double got;
    if (f[0] == "f_sf") {
      got = f_sf(parse_double(f[1]), parse_double(f[2]), parse_double(f[3]));
    } else if (f[0] == "chi_sq_sf") {
      got = chi_sq_sf(parse_double(f[1]), parse_double(f[2]));
    } else if (f[0] == "normal_sf") {
      got = std_normal_sf(parse_double(f[1]));
    } else {
      continue;
    }
    ++counts[f[0]];
    const double err = std::fabs(got - parse_double(f[4]));
    worst = std::max(worst, err);
    c.require(err <= 1e-10, f[0] + " mismatch");
  }
  c.require(counts["f_sf"] == 200 && counts["chi_sq_sf"] == 200 && counts["normal_sf"] == 200, "grid incomplete");
  c.note = fmt("%.0f points, max abs error %.1e", counts["f_sf"] + counts["chi_sq_sf"] + counts["normal_sf"], worst);
  return c;
}

Check criterion8() {
  Check c;
  RngStream rng(kSeed, 8);
  int cases = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + trial % 4;
    std::vector<std::vector<double>> g(k);
    for (auto& v : g) {
      const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform() * 12);
      const double sd = 0.5 + 3 * rng.uniform();
      for (std::size_t i = 0; i < n; ++i) v.push_back(sd * rng.normal());
    }
    auto moved = g;
    const double scale = 0.1 + 10 * rng.uniform();
    for (auto& v : moved) {
      const double shift = 50 * rng.normal();
      for (double& x : v) x = scale * x + shift;
    }
    auto common = g;
    const double shift = 50 * rng.normal();
    for (auto& v : common) {
      for (double& x : v) x = scale * x + shift;
    }
    const auto a = GroupedSample::from_values(g);
    const auto b = GroupedSample::from_values(moved);
    const auto cm = GroupedSample::from_values(common);
    auto close = [](double x, double y) { return std::fabs(x - y) <= 1e-9 * std::max(1.0, std::fabs(x)); };
    for (auto kind : {CenterKind::mean(), CenterKind::median(), CenterKind::trimmed()}) {
      c.require(close(levene_test(a, kind).statistic, levene_test(b, kind).statistic), "levene invariance");
      const auto t0 = trend_test(a, ScoreSet::linear(k), kind);
      const auto t1 = trend_test(b, ScoreSet::linear(k), kind);
      c.require(close(t0.z_statistic, t1.z_statistic), "trend invariance");
      ScoreSet affine = ScoreSet::linear(k);
      for (double& w : affine.w) w = 3 * w - 7;
      c.require(close(t0.z_statistic, trend_test(a, affine, kind).z_statistic), "trend score invariance");
    }
    c.require(close(levene_test(a, CenterKind::median(), Correction::HinesHines).statistic,
                    levene_test(b, CenterKind::median(), Correction::HinesHines).statistic),
              "Hines-Hines invariance");
    c.require(close(bartlett_m(a).statistic, bartlett_m(b).statistic), "bartlett invariance");
    c.require(close(anova_f(a).statistic, anova_f(cm).statistic), "anova invariance");
    c.require(close(welch_anova(a).statistic, welch_anova(cm).statistic), "welch invariance");
    const double level = 0.1 + 0.2 * rng.uniform();
    const auto ad = adaptive_anova(a, {.preliminary_level = level});
    c.require((ad.preliminary.p_value < level) == (ad.chosen_branch == Branch::Welch), "adaptive branch rule");
    ++cases;
  }

  // simulate determinism across runs and worker counts
  int code1 = 0, code2 = 0, code3 = 0;
  const std::vector<std::string> base = {"simulate", "--grid", "table1", "--reps", "2000", "--seed", "7"};
  auto with_workers = [&](const char* w) {
    auto args = base;
    args.insert(args.end(), {"--workers", w});
    return args;
  };
  const auto one = run_cli(with_workers("1"), code1);
  const auto four = run_cli(with_workers("4"), code2);
  const auto again = run_cli(with_workers("1"), code3);
  c.require(code1 == 0 && code2 == 0 && code3 == 0, "simulate failed");
  c.require(one == four && one == again, "simulate output depends on workers");

  // null sanity: n_i = 20 normal data, every test within 4 SE of nominal
  auto null = base_scenario("null/n=20", 0, {}, 20, {1, 1, 1});
  null.tests = {TestSpec::anova(),
                TestSpec::welch(),
                TestSpec::adaptive_anova(),
                TestSpec::levene(CenterKind::mean()),
                TestSpec::levene(CenterKind::median()),
                TestSpec::levene(CenterKind::trimmed()),
                TestSpec::levene(CenterKind::median(), Correction::HinesHines),
                TestSpec::levene(CenterKind::mean(), Correction::OBrien),
                TestSpec::trend(CenterKind::mean()),
                TestSpec::trend(CenterKind::median()),
                TestSpec::trend(CenterKind::trimmed()),
                TestSpec::trend(CenterKind::mean(), Side::TwoSided),
                TestSpec::trend(CenterKind::median(), Side::TwoSided),
                TestSpec::bartlett(),
                TestSpec::box_anderson()};
  int outside = 0;
  for (const auto& t : run_scenario(null).tallies) {
    const double se = std::sqrt(0.05 * 0.95 / t.valid);
    c.require(t.errors == 0, "replicate errors under continuous data");
    if (std::fabs(t.rejection_rate - 0.05) >= 4 * se) {
      ++outside;
      std::printf("  criterion 8 null size %s: %.4f (4 SE = %.4f)\n", t.test.c_str(), t.rejection_rate, 4 * se);
    }
  }
  c.require(outside == 0, "null sanity: some sizes outside nominal +/- 4 SE");

  // MC coherence
  for (const auto& [name, tests] : parse_sim_csv(one)) {
    for (const auto& [test, rate] : tests) c.require(rate >= 0.0 && rate <= 1.0, "rate out of range");
  }
  c.note = fmt("%.0f invariance cases; simulate byte-identical for 1 and 4 workers; %.0f of 15 null sizes outside 4 SE",
               cases, outside);
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Check()>>> criteria = {
      {"Table 1 size reproduction", criterion1},
      {"Welch two-group reduction", criterion2},
      {"hand-computed micro-oracle", criterion3},
      {"trend power exceeds homogeneity power", criterion4},
      {"small-sample level behavior", criterion5},
      {"Box-Anderson direction", criterion6},
      {"special-function accuracy", criterion7},
      {"property suites and determinism", criterion8},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.failure = std::string("exception: ") + e.what();
    }
    if (!c.ok) ++failures;
    std::string text = c.note;
    if (!c.ok) text += (text.empty() ? "" : "; ") + c.failure;
    std::printf("criterion %zu: %s - %s: %s\n", i + 1, c.ok ? "PASS" : "FAIL", criteria[i].first, text.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
