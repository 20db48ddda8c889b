#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "addhaz/crossval.hpp"
#include "addhaz/random.hpp"
#include "addhaz/solver.hpp"
#include "addhaz/survdata.hpp"

namespace addhaz {

/// (1, 0, -1, 0, 0, 0) repeated `repeats` times, zero-padded to length p.
Eigen::VectorXd block_beta0(Index p, int repeats = 3);

/**
 * Generator settings for the additive-hazards simulation designs:
 * Z ~ N(0, (rho^|i-j|)) truncated to beta0'Z > -1, hazard 1 + beta0'Z,
 * censoring C ~ U(0, c0) with c0 calibrated to the target censoring rate.
 */
struct SimStudyConfig {
  Index n = 200;
  Index p = 50;
  double rho = 0.1;
  /// Empty means block_beta0(p, 3).
  Eigen::VectorXd beta0;
  double target_censoring = 0.25;
  /// Weak effects: this many zero coefficients get sign * U(0, eps).
  Index weak_effect_count = 0;
  double weak_effect_eps = 0.1;
  int replicates = 100;
  std::uint64_t seed = 1;
  Index test_n = 500;

  void validate() const;
  Eigen::VectorXd base_beta0() const;
};

struct SimDraw {
  SurvivalDataset data;
  Eigen::VectorXd beta0;
  std::vector<Index> strong_support;
  std::vector<Index> weak_support;
};

struct SimMetrics {
  double pe1 = 0.0;
  double pe2 = 0.0;
  double l2_loss = 0.0;
  double l1_loss = 0.0;
  Index num_selected = 0;
  Index false_negatives = 0;
  Index false_negatives_strong = 0;
};

/// Coefficients for one replicate, including any weak-effect perturbation.
struct TrueCoefficients {
  Eigen::VectorXd beta0;
  std::vector<Index> strong_support;
  std::vector<Index> weak_support;
};
TrueCoefficients draw_beta0(const SimStudyConfig& cfg, Rng& rng);

/// Fraction of N(0, AR1) draws with beta0'Z > -1.
double acceptance_probability(const Eigen::VectorXd& beta0, double rho, Index draws, Rng& rng);

/// n subjects from the design with censoring bound c0.
SurvivalDataset draw_subjects(const Eigen::VectorXd& beta0, double rho, Index n, double c0,
                              Rng& rng);

/// Training data for one replicate.
SimDraw gen_dataset(const SimStudyConfig& cfg, double c0, std::uint64_t replicate_seed);

/// Monte-Carlo bisection for the censoring bound c0 hitting the target rate.
double calibrate_censoring(const SimStudyConfig& cfg);

SimMetrics eval_metrics(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta0,
                        const std::vector<Index>& strong_support, const SurvivalDataset& test);

/// Unpenalized pseudoscore estimate restricted to `support`.
Eigen::VectorXd oracle_fit(const PseudoscoreSystem& sys, const std::vector<Index>& support);
Eigen::VectorXd oracle_fit(const SurvivalDataset& ds, const std::vector<Index>& support);

/**
 * Entry m-1 is the largest number of true-support variables in any path
 * model with at most m nonzeros, for m = 1..max_size.
 */
std::vector<double> selection_curve(const SolutionPath& path,
                                     const std::vector<Index>& true_support, Index max_size);

struct MethodOutcome {
  SimMetrics metrics;
  double lambda = 0.0;
  std::size_t lambda_index = 0;
  std::vector<double> curve;
};

struct ReplicateOutcome {
  int replicate = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double censoring_rate = 0.0;
  std::vector<MethodOutcome> methods;
  SimMetrics oracle;
};

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
};

struct MethodSummary {
  std::string label;
  Summary pe1, pe2, l2_loss, l1_loss, num_selected, false_negatives, false_negatives_strong;
  std::vector<double> mean_curve;
  int replicates = 0;
};

struct StudyOptions {
  std::vector<PathMethod> methods;
  FitConfig fit;
  int folds = 10;
  SelectionRule rule = SelectionRule::kMin;
  Index curve_max_size = 30;
  int threads = 1;
};

struct StudyReport {
  SimStudyConfig config;
  double c0 = 0.0;
  std::vector<std::string> labels;
  std::vector<ReplicateOutcome> replicates;
  /// One row per method, then the oracle row.
  std::vector<MethodSummary> summary;
};

StudyReport run_study(const SimStudyConfig& cfg, const StudyOptions& options);

/// One replicate: train/test draw, CV per method, metrics and oracle row.
ReplicateOutcome run_replicate(const SimStudyConfig& cfg, const StudyOptions& options, double c0,
                               int replicate);

std::vector<MethodSummary> summarize(const StudyReport& report);

}  // namespace addhaz
