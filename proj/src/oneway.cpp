#include "levtest/oneway.hpp"

#include <stdexcept>

#include "levtest/errors.hpp"

namespace levtest {

namespace {
// Within-group variation below this fraction of the total is rounding noise.
constexpr double kDegenerateRatio = 1e-20;
}  // namespace

OneWayTable one_way_anova(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw std::invalid_argument("one-way ANOVA needs at least two groups");
  OneWayTable t;
  double total = 0.0;
  std::size_t n_total = 0;
  t.group_means.reserve(groups.size());
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("one-way ANOVA: empty group");
    double sum = 0.0;
    for (double y : g) sum += y;
    t.group_means.push_back(sum / static_cast<double>(g.size()));
    total += sum;
    n_total += g.size();
  }
  const std::size_t k = groups.size();
  if (n_total <= k) throw std::invalid_argument("one-way ANOVA needs N > k");
  const double grand = total / static_cast<double>(n_total);

  for (std::size_t i = 0; i < k; ++i) {
    const double m = t.group_means[i];
    t.between_ss += static_cast<double>(groups[i].size()) * (m - grand) * (m - grand);
    for (double y : groups[i]) t.within_ss += (y - m) * (y - m);
  }
  t.df1 = static_cast<double>(k - 1);
  t.df2 = static_cast<double>(n_total - k);
  const double total_ss = t.between_ss + t.within_ss;
  if (!(t.within_ss > kDegenerateRatio * total_ss)) {
    throw DegenerateDataError("within-group variation is zero; the F ratio is undefined");
  }
  t.f = (t.between_ss / t.df1) / (t.within_ss / t.df2);
  return t;
}

}  // namespace levtest
