#include "addhaz/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace addhaz {

Eigen::VectorXd risk_scores(const SurvivalDataset& ds, const Eigen::VectorXd& beta) {
  if (beta.size() != ds.p()) {
    throw std::invalid_argument("risk_scores: coefficient length " + std::to_string(beta.size()) +
                                " does not match p = " + std::to_string(ds.p()));
  }
  return ds.covariates() * beta;
}

std::vector<int> risk_split(const SurvivalDataset& ds, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd score = risk_scores(ds, beta);
  std::vector<Index> order(static_cast<std::size_t>(ds.n()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return score(a) < score(b); });
  const std::size_t low = (order.size() + 1) / 2;
  std::vector<int> label(order.size(), 1);
  for (std::size_t k = 0; k < low; ++k) label[static_cast<std::size_t>(order[k])] = 0;
  return label;
}

double chi_squared1_upper(double x) {
  if (!(x > 0.0)) return 1.0;
  return std::erfc(std::sqrt(x / 2.0));
}

LogRankResult logrank_test(std::span<const double> times, std::span<const int> status,
                           std::span<const int> groups) {
  const std::size_t n = times.size();
  if (status.size() != n || groups.size() != n) {
    throw std::invalid_argument("logrank_test: input lengths differ");
  }
  LogRankResult out;
  for (std::size_t i = 0; i < n; ++i) {
    if (groups[i] != 0 && groups[i] != 1) throw std::invalid_argument("group labels must be 0/1");
    ++out.group_sizes[static_cast<std::size_t>(groups[i])];
    if (status[i] == 1) ++out.observed_events[static_cast<std::size_t>(groups[i])];
  }
  if (out.group_sizes[0] == 0 || out.group_sizes[1] == 0) {
    throw std::invalid_argument("logrank_test: both groups must be nonempty");
  }
  if (out.observed_events[0] + out.observed_events[1] == 0) {
    throw std::invalid_argument("logrank_test: no events");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  double at_risk = static_cast<double>(n);
  double at_risk0 = static_cast<double>(out.group_sizes[0]);
  double o_minus_e = 0.0;
  double variance = 0.0;
  double expected0 = 0.0;
  std::size_t pos = 0;
  while (pos < n) {
    const double t = times[order[pos]];
    double deaths = 0.0;
    double deaths0 = 0.0;
    double leaving = 0.0;
    double leaving0 = 0.0;
    std::size_t end = pos;
    for (; end < n && times[order[end]] == t; ++end) {
      const std::size_t i = order[end];
      const bool g0 = groups[i] == 0;
      leaving += 1.0;
      leaving0 += g0;
      if (status[i] == 1) {
        deaths += 1.0;
        deaths0 += g0;
      }
    }
    if (deaths > 0.0) {
      const double e0 = deaths * at_risk0 / at_risk;
      expected0 += e0;
      o_minus_e += deaths0 - e0;
      if (at_risk > 1.0) {
        variance += deaths * (at_risk0 / at_risk) * (1.0 - at_risk0 / at_risk) *
                    (at_risk - deaths) / (at_risk - 1.0);
      }
    }
    at_risk -= leaving;
    at_risk0 -= leaving0;
    pos = end;
  }
  if (!(variance > 0.0)) throw std::runtime_error("logrank_test: zero variance");
  out.expected_events = {expected0,
                         static_cast<double>(out.observed_events[0] + out.observed_events[1]) -
                             expected0};
  out.statistic = o_minus_e * o_minus_e / variance;
  out.p_value = chi_squared1_upper(out.statistic);
  return out;
}

}  // namespace addhaz
