#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "levtest/errors.hpp"
#include "levtest/means.hpp"
#include "levtest/numerics.hpp"

using namespace levtest;

namespace {

struct WelchOracle {
  long double f, df2;
};

// Long-double evaluation from group moments.
WelchOracle welch_oracle(const std::vector<std::vector<double>>& groups) {
  const long double k = groups.size();
  std::vector<long double> n, m, w;
  for (const auto& g : groups) {
    long double s = 0;
    for (double x : g) s += x;
    const long double mean = s / g.size();
    long double ss = 0;
    for (double x : g) ss += (x - mean) * (x - mean);
    n.push_back(g.size());
    m.push_back(mean);
    w.push_back(g.size() / (ss / (g.size() - 1)));
  }
  long double big_w = 0, wm = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    big_w += w[i];
    wm += w[i] * m[i];
  }
  wm /= big_w;
  long double a = 0, lambda = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    a += w[i] * (m[i] - wm) * (m[i] - wm);
    lambda += (1 - w[i] / big_w) * (1 - w[i] / big_w) / (n[i] - 1);
  }
  a /= (k - 1);
  const long double b = 1 + 2 * (k - 2) / (k * k - 1) * lambda;
  return {a / b, (k * k - 1) / (3 * lambda)};
}

std::vector<std::vector<double>> random_groups(RngStream& rng, std::size_t k) {
  std::vector<std::vector<double>> g(k);
  for (auto& v : g) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 20);
    const double sd = 0.2 + 5 * rng.uniform();
    const double mu = rng.normal();
    for (std::size_t j = 0; j < n; ++j) v.push_back(mu + sd * rng.normal());
  }
  return g;
}

}  // namespace

TEST_CASE("anova_f hand-computed instance") {
  const auto r = anova_f(GroupedSample::from_values({{1, 2, 3}, {2, 4, 6}}));
  CHECK(std::fabs(r.statistic - 2.4) < 1e-12);
  CHECK(r.df1 == 1.0);
  CHECK(*r.df2 == 4.0);
  CHECK(r.method == "anova");
  CHECK(std::fabs(r.p_value - f_sf(2.4, 1, 4)) < 1e-15);
}

TEST_CASE("anova_f degenerate input") {
  CHECK_THROWS_AS(anova_f(GroupedSample::from_values({{1, 1}, {2, 2}})), DegenerateDataError);
}

TEST_CASE("welch_anova with two groups is the squared Welch t") {
  RngStream rng(11, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = random_groups(rng, 2);
    const auto r = welch_anova(GroupedSample::from_values(g));
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
    const long double df = (v[0] + v[1]) * (v[0] + v[1]) /
                           (v[0] * v[0] / (g[0].size() - 1) + v[1] * v[1] / (g[1].size() - 1));
    CHECK(std::fabs(r.statistic - static_cast<double>(t2)) <= 1e-12 * std::max(1.0, r.statistic));
    CHECK(std::fabs(*r.df2 - static_cast<double>(df)) <= 1e-12 * static_cast<double>(df));
    CHECK(r.df1 == 1.0);
    // two-sided t tail: I_{df/(df+t^2)}(df/2, 1/2)
    const double p_t = reg_inc_beta(static_cast<double>(df) / 2, 0.5, static_cast<double>(df / (df + t2)));
    CHECK(std::fabs(r.p_value - p_t) <= 1e-12);
  }
}

TEST_CASE("welch_anova against the long-double evaluation") {
  RngStream rng(12, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = random_groups(rng, 3 + trial % 4);
    const auto r = welch_anova(GroupedSample::from_values(g));
    const auto o = welch_oracle(g);
    CHECK(std::fabs(r.statistic - static_cast<double>(o.f)) <= 1e-11 * std::max(1.0, r.statistic));
    CHECK(std::fabs(*r.df2 - static_cast<double>(o.df2)) <= 1e-11 * static_cast<double>(o.df2));
    CHECK(r.df1 == static_cast<double>(g.size() - 1));
  }
}

TEST_CASE("welch_anova equals the classical F for two equal-size groups with equal variances") {
  const auto s = GroupedSample::from_values({{1, 2, 3, 4}, {6, 5, 8, 7}});
  const auto w = welch_anova(s);
  const auto f = anova_f(s);
  CHECK(w.statistic == doctest::Approx(f.statistic).epsilon(1e-12));
  CHECK(*w.df2 == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(w.p_value == doctest::Approx(f.p_value).epsilon(1e-12));
}

TEST_CASE("welch_anova errors") {
  CHECK_THROWS_AS(welch_anova(GroupedSample::from_values({{1, 2, 3}, {4}})), std::invalid_argument);
  CHECK_THROWS_AS(welch_anova(GroupedSample::from_values({{1, 2, 3}, {4, 4, 4}})), DegenerateDataError);
}

TEST_CASE("property: mean tests are location-shift and scale invariant") {
  RngStream rng(13, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_groups(rng, 2 + trial % 4);
    auto moved = g;
    const double c = 0.01 + 30 * rng.uniform();
    const double shift = 1000 * rng.normal();
    for (auto& v : moved) {
      for (double& x : v) x = c * x + shift;
    }
    const auto a = GroupedSample::from_values(g);
    const auto b = GroupedSample::from_values(moved);
    for (auto [x, y] : {std::pair{anova_f(a), anova_f(b)}, std::pair{welch_anova(a), welch_anova(b)}}) {
      CHECK(std::fabs(x.statistic - y.statistic) <= 1e-8 * std::max(1.0, x.statistic));
      CHECK(std::fabs(x.p_value - y.p_value) <= 1e-8);
    }
  }
}

TEST_CASE("adaptive_anova branch rule") {
  RngStream rng(14, 0);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = random_groups(rng, 2 + trial % 3);
    for (auto& v : g) {
      if (v.size() < 3) v.push_back(rng.normal());
    }
    const auto s = GroupedSample::from_values(g);
    const double level = 0.05 + 0.4 * rng.uniform();
    const auto r = adaptive_anova(s, {.preliminary_level = level});
    const auto pre = levene_test(s, CenterKind::median());
    CHECK(r.preliminary.p_value == pre.p_value);
    if (pre.p_value < level) {
      CHECK(r.chosen_branch == Branch::Welch);
      CHECK(r.final.p_value == welch_anova(s).p_value);
    } else {
      CHECK(r.chosen_branch == Branch::ClassicalF);
      CHECK(r.final.p_value == anova_f(s).p_value);
    }
  }
}

TEST_CASE("adaptive_anova examples") {
  const auto equal = GroupedSample::from_values({{1, 2, 3, 4, 5}, {2, 3, 4, 5, 6}, {0, 1, 2, 3, 4}});
  CHECK(adaptive_anova(equal).chosen_branch == Branch::ClassicalF);
  CHECK(adaptive_anova(equal).warnings.empty());

  const auto spread = GroupedSample::from_values(
      {{0.1, -0.1, 0.05, -0.05, 0.0, 0.02, -0.02, 0.08, -0.08, 0.01},
       {100, -100, 50, -50, 0, 20, -20, 80, -80, 10},
       {1000, -1000, 500, -500, 0, 200, -200, 800, -800, 100}});
  CHECK(adaptive_anova(spread).chosen_branch == Branch::Welch);
  // level 0 never rejects
  CHECK(adaptive_anova(spread, {.preliminary_level = 0.0}).chosen_branch == Branch::ClassicalF);

  const auto warned = adaptive_anova(equal, {.preliminary_level = 0.5});
  REQUIRE(warned.warnings.size() == 1);
  CHECK(warned.warnings[0].find("outside the recommended range") != std::string::npos);
  CHECK(adaptive_anova(equal, {.preliminary_level = 0.25}).warnings.empty());
  CHECK(adaptive_anova(equal, {.preliminary_level = 0.15}).warnings.empty());
  CHECK_THROWS_AS(adaptive_anova(equal, {.preliminary_level = 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(adaptive_anova(equal, {.preliminary_level = -0.1}), std::invalid_argument);
  CHECK(to_string(Branch::Welch) == "welch");
}
