#pragma once

#include <cstdint>
#include <vector>

#include "addhaz/solver.hpp"
#include "addhaz/survdata.hpp"

namespace addhaz {

enum class SelectionRule { kMin, kOneSe };

SelectionRule parse_selection_rule(const std::string& name);
std::string to_string(SelectionRule rule);

struct CvResult {
  std::vector<double> lambdas;
  /// Mean held-out loss per grid point; NaN where some fold's path stopped early.
  std::vector<double> cv_scores;
  std::vector<double> cv_se;
  std::size_t best_index = 0;
  std::vector<int> fold_assignment;
  /// fold_losses[m][k] = L^(m)(beta^(-m)(lambda_k)).
  std::vector<std::vector<double>> fold_losses;
  /// Path on the full data over the same grid.
  SolutionPath full_path;
};

/**
 * Stratified fold labels: events and censored subjects are shuffled
 * separately and dealt round-robin, so every fold receives events when there
 * are at least M of them.
 */
std::vector<int> stratified_folds(const SurvivalDataset& ds, int folds, std::uint64_t seed);

/**
 * M-fold cross-validation with the pseudoscore loss of each held-out fold
 * as the criterion.
 *
 * The lambda grid is shared by every fold and the full-data fit. Its top is
 * the largest of the full-data and fold-complement lambda_max values, so the
 * score at index 0 is exactly zero.
 */
CvResult kfold_cv(const SurvivalDataset& ds, const PathMethod& method, const FitConfig& cfg,
                  int folds, std::uint64_t seed, int threads = 1);

double select_lambda(const CvResult& cv, SelectionRule rule);
std::size_t select_index(const CvResult& cv, SelectionRule rule);

}  // namespace addhaz
