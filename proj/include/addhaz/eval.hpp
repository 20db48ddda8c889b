#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "addhaz/survdata.hpp"

namespace addhaz {

struct LogRankResult {
  /// (sum O - E)^2 / sum Var, chi-squared with one degree of freedom.
  double statistic = 0.0;
  double p_value = 1.0;
  std::array<Index, 2> group_sizes{};
  std::array<Index, 2> observed_events{};
  std::array<double, 2> expected_events{};
};

/// Risk scores beta' Z_i.
Eigen::VectorXd risk_scores(const SurvivalDataset& ds, const Eigen::VectorXd& beta);

/**
 * 0 = low risk for the ceil(n/2) lowest scores, 1 = high risk for the rest.
 * Equal scores are ordered by row index.
 */
std::vector<int> risk_split(const SurvivalDataset& ds, const Eigen::VectorXd& beta);

/// Two-sample Mantel-Haenszel log-rank test; groups are labelled 0 and 1.
LogRankResult logrank_test(std::span<const double> times, std::span<const int> status,
                           std::span<const int> groups);

/// Upper tail of chi-squared(1).
double chi_squared1_upper(double x);

}  // namespace addhaz
