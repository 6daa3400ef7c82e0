#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "levtest/errors.hpp"
#include "levtest/means.hpp"
#include "levtest/numerics.hpp"
#include "levtest/sim.hpp"
#include "levtest/spread.hpp"
#include "levtest/trend.hpp"

namespace py = pybind11;
using namespace levtest;

namespace {

using Groups = std::vector<std::vector<double>>;

py::dict result_dict(const TestResult& r) {
  py::dict d;
  d["method"] = r.method;
  d["statistic"] = r.statistic;
  d["df1"] = r.df1;
  d["df2"] = r.df2 ? py::object(py::float_(*r.df2)) : py::none();
  d["p_value"] = r.p_value;
  d["center"] = r.center ? py::object(py::str(std::string(to_string(r.center->type)))) : py::none();
  d["correction"] = r.correction ? py::object(py::str(std::string(to_string(*r.correction)))) : py::none();
  py::dict details;
  for (const auto& [k, v] : r.details) details[py::str(k)] = v;
  d["details"] = details;
  return d;
}

py::dict report_dict(const SimulationReport& r) {
  py::dict d;
  d["scenario"] = r.scenario.name;
  py::list tallies;
  for (const auto& t : r.tallies) {
    py::dict e;
    e["test"] = t.test;
    e["rejections"] = t.rejections;
    e["valid"] = t.valid;
    e["errors"] = t.errors;
    e["rejection_rate"] = t.rejection_rate;
    e["mc_standard_error"] = t.mc_standard_error;
    tallies.append(e);
  }
  d["tallies"] = tallies;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Variance-homogeneity, trend and mean tests for grouped samples";

  auto degenerate = py::register_exception<DegenerateDataError>(m, "DegenerateDataError", PyExc_ValueError);
  py::register_exception<KurtosisCorrectionError>(m, "KurtosisCorrectionError", degenerate.ptr());

  m.def("ln_gamma", &ln_gamma, py::arg("x"));
  m.def("reg_inc_beta", &reg_inc_beta, py::arg("a"), py::arg("b"), py::arg("x"));
  m.def("reg_inc_gamma_lower", &reg_inc_gamma_lower, py::arg("s"), py::arg("x"));
  m.def("f_sf", &f_sf, py::arg("x"), py::arg("d1"), py::arg("d2"));
  m.def("chi_sq_sf", &chi_sq_sf, py::arg("x"), py::arg("df"));
  m.def("std_normal_sf", &std_normal_sf, py::arg("z"));

  m.def(
      "levene",
      [](const Groups& g, const std::string& center, double trim, const std::string& correction) {
        return result_dict(levene_test(GroupedSample::from_values(g), parse_center(center, trim),
                                       parse_correction(correction)));
      },
      py::arg("groups"), py::arg("center") = "mean", py::arg("trim") = 0.25, py::arg("correction") = "none");
  m.def(
      "bartlett", [](const Groups& g) { return result_dict(bartlett_m(GroupedSample::from_values(g))); },
      py::arg("groups"));
  m.def(
      "box_anderson", [](const Groups& g) { return result_dict(box_anderson_b3(GroupedSample::from_values(g))); },
      py::arg("groups"));
  m.def(
      "kurtosis", [](const Groups& g) { return kurtosis_estimate(GroupedSample::from_values(g)); },
      py::arg("groups"));

  m.def(
      "trend",
      [](const Groups& g, std::optional<std::vector<double>> scores, const std::string& center, double trim) {
        const auto s = GroupedSample::from_values(g);
        const auto r = trend_test(s, scores ? ScoreSet{*scores} : ScoreSet::linear(s.k()), parse_center(center, trim));
        py::dict d;
        d["beta_hat"] = r.beta_hat;
        d["std_error"] = r.std_error;
        d["z"] = r.z_statistic;
        d["p_increasing"] = r.p_one_sided_increasing;
        d["p_decreasing"] = r.p_one_sided_decreasing;
        d["p_two_sided"] = r.p_two_sided;
        d["scores"] = r.scores;
        return d;
      },
      py::arg("groups"), py::arg("scores") = std::nullopt, py::arg("center") = "median", py::arg("trim") = 0.25);

  m.def(
      "anova", [](const Groups& g) { return result_dict(anova_f(GroupedSample::from_values(g))); },
      py::arg("groups"));
  m.def(
      "welch", [](const Groups& g) { return result_dict(welch_anova(GroupedSample::from_values(g))); },
      py::arg("groups"));
  m.def(
      "adaptive",
      [](const Groups& g, double level, const std::string& center, double trim, const std::string& correction) {
        AdaptiveConfig cfg{level, parse_center(center, trim), parse_correction(correction)};
        const auto r = adaptive_anova(GroupedSample::from_values(g), cfg);
        py::dict d;
        d["branch"] = std::string(to_string(r.chosen_branch));
        d["preliminary"] = result_dict(r.preliminary);
        d["final"] = result_dict(r.final);
        d["warnings"] = r.warnings;
        return d;
      },
      py::arg("groups"), py::arg("level") = 0.15, py::arg("center") = "median", py::arg("trim") = 0.25,
      py::arg("correction") = "none");

  m.def(
      "simulate",
      [](const std::string& grid, std::uint64_t seed, std::size_t reps, unsigned workers) {
        std::vector<Scenario> scenarios;
        if (grid == "table1") {
          scenarios = table1_grid(seed, reps);
        } else if (grid == "power-ordering") {
          scenarios = power_ordering_grid({CenterKind::mean(), CenterKind::median(), CenterKind::trimmed()}, seed,
                                          reps);
        } else {
          throw std::invalid_argument("unknown grid '" + grid + "'");
        }
        std::vector<SimulationReport> reports;
        {
          py::gil_scoped_release release;
          reports = run_grid(scenarios, workers);
        }
        py::list out;
        for (const auto& r : reports) out.append(report_dict(r));
        return out;
      },
      py::arg("grid") = "table1", py::arg("seed") = 0, py::arg("reps") = 10000, py::arg("workers") = 0);
}
