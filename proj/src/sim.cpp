#include "levtest/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "levtest/errors.hpp"
#include "levtest/format.hpp"
#include "levtest/spread.hpp"

namespace levtest {

// ---------------------------------------------------------------------------
// TestSpec

TestSpec TestSpec::welch() {
  TestSpec t;
  t.kind = Kind::Welch;
  return t;
}

TestSpec TestSpec::adaptive_anova(AdaptiveConfig config) {
  TestSpec t;
  t.kind = Kind::Adaptive;
  t.adaptive = config;
  return t;
}

TestSpec TestSpec::levene(CenterKind center, Correction correction) {
  TestSpec t;
  t.kind = Kind::Levene;
  t.center = center;
  t.correction = correction;
  return t;
}

TestSpec TestSpec::trend(CenterKind center, Side side, std::vector<double> scores) {
  TestSpec t;
  t.kind = Kind::Trend;
  t.center = center;
  t.side = side;
  t.scores = std::move(scores);
  return t;
}

TestSpec TestSpec::bartlett() {
  TestSpec t;
  t.kind = Kind::Bartlett;
  return t;
}

TestSpec TestSpec::box_anderson() {
  TestSpec t;
  t.kind = Kind::BoxAnderson;
  return t;
}

std::string_view to_string(TestSpec::Kind kind) {
  switch (kind) {
    case TestSpec::Kind::Anova: return "anova";
    case TestSpec::Kind::Welch: return "welch";
    case TestSpec::Kind::Adaptive: return "adaptive";
    case TestSpec::Kind::Levene: return "levene";
    case TestSpec::Kind::Trend: return "trend";
    case TestSpec::Kind::Bartlett: return "bartlett";
    case TestSpec::Kind::BoxAnderson: return "box-anderson";
  }
  return "unknown";
}

TestSpec::Kind parse_test_kind(std::string_view name) {
  for (auto kind : {TestSpec::Kind::Anova, TestSpec::Kind::Welch, TestSpec::Kind::Adaptive,
                    TestSpec::Kind::Levene, TestSpec::Kind::Trend, TestSpec::Kind::Bartlett,
                    TestSpec::Kind::BoxAnderson}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown test '" + std::string(name) + "'");
}

namespace {

std::string center_token(CenterKind c) {
  if (c.type == CenterKind::Type::Trimmed) return "trimmed:trim=" + format_double(c.trim);
  return std::string(to_string(c.type));
}

}  // namespace

std::string TestSpec::id() const {
  std::string out(to_string(kind));
  switch (kind) {
    case Kind::Levene:
      out += ":center=" + center_token(center) + ":correction=" + std::string(to_string(correction));
      break;
    case Kind::Trend:
      out += ":center=" + center_token(center) + ":side=" + std::string(to_string(side));
      out += ":scores=" + (scores.empty() ? std::string("linear") : join_numbers(scores, ';'));
      break;
    case Kind::Adaptive:
      out += ":level=" + format_double(adaptive.preliminary_level) +
             ":center=" + center_token(adaptive.preliminary_center) +
             ":correction=" + std::string(to_string(adaptive.preliminary_correction));
      break;
    default:
      break;
  }
  return out;
}

TestSpec TestSpec::parse(std::string_view text) {
  const std::vector<std::string> parts = split_trimmed(text, ':');
  TestSpec t;
  t.kind = parse_test_kind(parts.front());
  std::string center_name;
  double trim_value = 0.25;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("test option '" + parts[i] + "' is not key=value");
    }
    const std::string key(trim(std::string_view(parts[i]).substr(0, eq)));
    const std::string value(trim(std::string_view(parts[i]).substr(eq + 1)));
    if (key == "center") {
      center_name = value;
    } else if (key == "trim") {
      trim_value = parse_double(value);
    } else if (key == "correction") {
      t.correction = parse_correction(value);
      t.adaptive.preliminary_correction = t.correction;
    } else if (key == "side") {
      t.side = parse_side(value);
    } else if (key == "level") {
      t.adaptive.preliminary_level = parse_double(value);
    } else if (key == "scores") {
      t.scores.clear();
      if (value != "linear") {
        for (const auto& s : split_trimmed(value, ';')) t.scores.push_back(parse_double(s));
      }
    } else {
      throw std::invalid_argument("unknown test option '" + key + "'");
    }
  }
  if (!center_name.empty()) {
    t.center = parse_center(center_name, trim_value);
    t.adaptive.preliminary_center = t.center;
  }
  return t;
}

double TestSpec::p_value(const GroupedSample& sample) const {
  switch (kind) {
    case Kind::Anova: return anova_f(sample).p_value;
    case Kind::Welch: return welch_anova(sample).p_value;
    case Kind::Adaptive: return levtest::adaptive_anova(sample, adaptive).final.p_value;
    case Kind::Levene: return levene_test(sample, center, correction).p_value;
    case Kind::Trend: {
      const ScoreSet s = scores.empty() ? ScoreSet::linear(sample.k()) : ScoreSet{scores};
      return trend_test(sample, s, center).p_value(side);
    }
    case Kind::Bartlett: return bartlett_m(sample).p_value;
    case Kind::BoxAnderson: return box_anderson_b3(sample).p_value;
  }
  throw std::invalid_argument("unknown test kind");
}

// ---------------------------------------------------------------------------
// Scenario

void Scenario::validate() const {
  distribution.validate();
  const std::size_t k = group_sizes.size();
  if (k < 2) throw std::invalid_argument("scenario '" + name + "' needs at least two groups");
  if (sigma_ratios.size() != k) {
    throw std::invalid_argument("scenario '" + name + "': sigma_ratios length differs from group_sizes");
  }
  if (mean_shifts.size() != k) {
    throw std::invalid_argument("scenario '" + name + "': mean_shifts length differs from group_sizes");
  }
  for (std::size_t n : group_sizes) {
    if (n < 2) throw std::invalid_argument("scenario '" + name + "': groups need at least two values");
  }
  for (double s : sigma_ratios) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("scenario '" + name + "': sigma ratios must be positive");
    }
  }
  for (double m : mean_shifts) {
    if (!std::isfinite(m)) throw std::invalid_argument("scenario '" + name + "': mean shifts must be finite");
  }
  if (tests.empty()) throw std::invalid_argument("scenario '" + name + "' has no tests");
  for (const TestSpec& t : tests) {
    if (t.kind == TestSpec::Kind::Trend && !t.scores.empty()) ScoreSet{t.scores}.validate(k);
  }
  if (!(nominal_level > 0.0 && nominal_level < 1.0)) {
    throw std::invalid_argument("scenario '" + name + "': nominal level must lie in (0, 1)");
  }
  if (replications == 0) throw std::invalid_argument("scenario '" + name + "': replications must be >= 1");
  if (replications > 0xFFFFFFFFull || index > 0xFFFFFFFFull) {
    throw std::invalid_argument("scenario '" + name + "': index and replications must fit in 32 bits");
  }
}

const TestTally& SimulationReport::tally(const std::string& test_id) const {
  for (const TestTally& t : tallies) {
    if (t.test == test_id) return t;
  }
  throw std::out_of_range("no tally for test '" + test_id + "'");
}

std::uint64_t replicate_stream_id(std::uint64_t scenario_index, std::uint64_t replicate) {
  return (scenario_index << 32) | (replicate & 0xFFFFFFFFull);
}

GroupedSample simulate_dataset(const Scenario& s, std::uint64_t replicate) {
  RngStream stream(s.master_seed, replicate_stream_id(s.index, replicate));
  std::vector<std::vector<double>> values(s.group_sizes.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i].reserve(s.group_sizes[i]);
    for (std::size_t j = 0; j < s.group_sizes[i]; ++j) {
      const double raw = s.distribution.location + s.distribution.scale * draw_standard(s.distribution, stream);
      values[i].push_back(s.mean_shifts[i] + s.sigma_ratios[i] * raw);
    }
  }
  return GroupedSample::from_values(std::move(values));
}

namespace {

enum Outcome : std::uint8_t { kAccept = 0, kReject = 1, kDegenerate = 2 };

unsigned resolve_workers(unsigned workers, std::size_t jobs) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(jobs, 1)));
}

}  // namespace

SimulationReport run_scenario(const Scenario& s, unsigned workers) {
  s.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t reps = s.replications;
  const std::size_t n_tests = s.tests.size();
  std::vector<std::uint8_t> outcomes(reps * n_tests, kAccept);

  constexpr std::size_t kChunk = 64;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(kChunk);
        if (begin >= reps) return;
        const std::size_t end = std::min(reps, begin + kChunk);
        for (std::size_t r = begin; r < end; ++r) {
          const GroupedSample data = simulate_dataset(s, r);
          for (std::size_t t = 0; t < n_tests; ++t) {
            std::uint8_t outcome = kDegenerate;
            try {
              outcome = s.tests[t].p_value(data) < s.nominal_level ? kReject : kAccept;
            } catch (const DegenerateDataError&) {
            }
            outcomes[r * n_tests + t] = outcome;
          }
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(reps);
    }
  };

  const unsigned n_workers = resolve_workers(workers, (reps + kChunk - 1) / kChunk);
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  SimulationReport report;
  report.scenario = s;
  for (std::size_t t = 0; t < n_tests; ++t) {
    TestTally tally;
    tally.test = s.tests[t].id();
    for (std::size_t r = 0; r < reps; ++r) {
      switch (outcomes[r * n_tests + t]) {
        case kReject: ++tally.rejections; ++tally.valid; break;
        case kAccept: ++tally.valid; break;
        default: ++tally.errors; break;
      }
    }
    if (tally.valid > 0) {
      const double rate = static_cast<double>(tally.rejections) / static_cast<double>(tally.valid);
      tally.rejection_rate = rate;
      tally.mc_standard_error = std::sqrt(rate * (1.0 - rate) / static_cast<double>(tally.valid));
    }
    report.tallies.push_back(std::move(tally));
  }
  report.elapsed = std::chrono::steady_clock::now() - start;
  return report;
}

std::vector<SimulationReport> run_grid(const std::vector<Scenario>& grid, unsigned workers) {
  std::vector<SimulationReport> out;
  out.reserve(grid.size());
  for (const Scenario& s : grid) out.push_back(run_scenario(s, workers));
  return out;
}

namespace {

std::string ratio_label(const std::vector<double>& ratios) {
  std::string out;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (i) out += ':';
    out += format_double(ratios[i]);
  }
  return out;
}

std::string sizes_label(const std::vector<std::size_t>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(sizes[i]);
  }
  return out;
}

const std::vector<std::vector<double>>& spread_ratios() {
  static const std::vector<std::vector<double>> kRatios = {{1, 1, 1}, {1, 2, 3}, {1, 3, 5}};
  return kRatios;
}

}  // namespace

std::vector<Scenario> table1_grid(std::uint64_t master_seed, std::size_t replications) {
  static const std::vector<std::vector<std::size_t>> kLayouts = {
      {10, 10, 10}, {10, 10, 20}, {10, 20, 10}, {20, 10, 10}};
  std::vector<Scenario> grid;
  for (const auto& sizes : kLayouts) {
    for (const auto& ratios : spread_ratios()) {
      Scenario s;
      s.index = grid.size();
      s.name = "table1/n=" + sizes_label(sizes) + "/sigma=" + ratio_label(ratios);
      s.group_sizes = sizes;
      s.sigma_ratios = ratios;
      s.mean_shifts.assign(sizes.size(), 0.0);
      s.tests = {TestSpec::anova(), TestSpec::welch(), TestSpec::adaptive_anova()};
      s.replications = replications;
      s.master_seed = master_seed;
      grid.push_back(std::move(s));
    }
  }
  return grid;
}

std::vector<Scenario> power_ordering_grid(const std::vector<CenterKind>& centers,
                                          std::uint64_t master_seed, std::size_t replications) {
  const std::vector<DistributionSpec> families = {
      {Family::Normal, 0.0, 1.0, 1.0},
      {Family::Exponential, 0.0, 1.0, 1.0},
      {Family::StudentT, 0.0, 1.0, 3.0},
      {Family::ChiSquared, 0.0, 1.0, 3.0},
  };
  std::vector<Scenario> grid;
  for (const auto& dist : families) {
    for (std::size_t n : {5u, 10u, 20u}) {
      for (const auto& ratios : spread_ratios()) {
        Scenario s;
        s.index = grid.size();
        s.name = "power/" + std::string(to_string(dist.family)) + "/n=" + sizes_label({n, n, n}) +
                 "/sigma=" + ratio_label(ratios);
        s.distribution = dist;
        s.group_sizes = {n, n, n};
        s.sigma_ratios = ratios;
        s.mean_shifts.assign(3, 0.0);
        for (const CenterKind& c : centers) {
          s.tests.push_back(TestSpec::levene(c));
          s.tests.push_back(TestSpec::trend(c, Side::Increasing));
        }
        s.replications = replications;
        s.master_seed = master_seed;
        grid.push_back(std::move(s));
      }
    }
  }
  return grid;
}

std::vector<SimulationReport> power_ordering_study(CenterKind center, std::uint64_t master_seed,
                                                   std::size_t replications, unsigned workers) {
  return run_grid(power_ordering_grid({center}, master_seed, replications), workers);
}

}  // namespace levtest
