#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "addhaz/penalties.hpp"
#include "addhaz/pseudoscore.hpp"

namespace addhaz {

struct FitConfig {
  /// Sup-norm coefficient change across a sweep that counts as converged.
  double tol = 1e-7;
  int max_sweeps = 10000;
  /// Path early stop: once a fit has more nonzeros than this, stop.
  std::optional<Index> max_active;
  int grid_size = 100;
  /// lambda_min / lambda_max of the geometric grid.
  double grid_ratio = 1e-3;

  void validate() const;
};

struct FitDiagnostics {
  int sweeps = 0;
  bool converged = false;
  /// Weighted objective L(beta) + sum_j V_jj p_lambda(|beta_j|) at exit.
  double objective = 0.0;
  /// kappa(p_lambda) < 1: each coordinate subproblem is strictly convex.
  bool coordinatewise_convex = false;
  /// Degenerate (V_jj = 0) coordinates with a nonzero warm start, held fixed.
  std::vector<Index> frozen;
  /// Objective at the start and after every sweep.
  std::vector<double> sweep_objectives;
  /// Sweeps whose objective rose by more than kDescentSlack.
  int monotone_violations = 0;

  static constexpr double kDescentSlack = 1e-12;
};

struct FitResult {
  Eigen::VectorXd beta;
  FitDiagnostics diagnostics;
};

/// Process-wide tally of sweep-level descent checks, for auditing.
struct DescentAudit {
  std::uint64_t fits = 0;
  std::uint64_t convex_fits = 0;
  std::uint64_t sweeps = 0;
  std::uint64_t violations = 0;
  std::uint64_t convex_violations = 0;
};
DescentAudit descent_audit();
void reset_descent_audit();

/**
 * A solution path over a decreasing lambda grid.
 *
 * `lambdas` always has the full grid; the per-point vectors cover only the
 * first `completed()` points, the rest being absent after an early stop.
 */
struct SolutionPath {
  PenaltySpec penalty = PenaltySpec::lasso();
  /// SICA shape sequence when the path was computed in stages.
  std::vector<double> stage_shapes;
  std::vector<double> lambdas;
  std::vector<Eigen::VectorXd> betas;
  std::vector<double> objective_values;
  std::vector<int> sweeps_used;
  std::vector<bool> converged_flags;
  std::vector<bool> coordinatewise_convex;
  /// Restricted global optimality condition failed on the active set.
  std::vector<bool> convexity_warnings;
  bool early_stopped = false;
  std::vector<Index> excluded;

  std::size_t completed() const { return betas.size(); }
  Index nonzeros(std::size_t k) const;
};

/// Weighted objective Q~(beta; lambda).
double weighted_objective(const PseudoscoreSystem& sys, const PenaltySpec& spec, double lambda,
                          const Eigen::Ref<const Eigen::VectorXd>& beta);

/// max_j |b_j| / V_jj over non-degenerate coordinates.
double lambda_max(const PseudoscoreSystem& sys);

/**
 * Smallest lambda at which zero is a coordinatewise fixed point of the given
 * penalty's thresholding. Equals lambda_max(sys) for L1, SCAD and MCP.
 */
double lambda_max(const PseudoscoreSystem& sys, const PenaltySpec& spec);

/// Geometric grid of cfg.grid_size points from top down to top * grid_ratio.
std::vector<double> lambda_grid(double top, const FitConfig& cfg);

/// Cyclic coordinate descent on Q~(.; lambda) from `warm_start`.
FitResult coordinate_descent(const PseudoscoreSystem& sys, const PenaltySpec& spec, double lambda,
                             const Eigen::Ref<const Eigen::VectorXd>& warm_start,
                             const FitConfig& cfg);

SolutionPath solve_path(const PseudoscoreSystem& sys, const PenaltySpec& spec,
                        const FitConfig& cfg);
SolutionPath solve_path(const PseudoscoreSystem& sys, const PenaltySpec& spec,
                        const FitConfig& cfg, std::span<const double> lambdas);

/**
 * SICA path computed in stages over a decreasing sequence of shapes: the
 * first shape gives a pilot path, each later stage refits every grid point
 * warm-started from the previous stage's solution at the same lambda. The
 * refit is also started from this stage's solution at the previous lambda and
 * from the plain single-shape path, and the lowest objective is kept.
 */
SolutionPath solve_path_sica_staged(const PseudoscoreSystem& sys,
                                    std::span<const double> shapes, const FitConfig& cfg);
SolutionPath solve_path_sica_staged(const PseudoscoreSystem& sys,
                                    std::span<const double> shapes, const FitConfig& cfg,
                                    std::span<const double> lambdas);

/// Lambda_min(V_SS) >= kappa(p_lambda) * max_{j in S} V_jj.
bool restricted_convexity_check(const PseudoscoreSystem& sys, const PenaltySpec& spec,
                                double lambda, std::span<const Index> active);

/// A penalty with an optional SICA shape schedule; what CV and studies fit.
struct PathMethod {
  std::string label;
  PenaltySpec penalty = PenaltySpec::lasso();
  /// Larger SICA shapes run first as pilot stages, ending at penalty.shape_a().
  std::vector<double> pilot_shapes;

  std::vector<double> shape_schedule() const;
  double top_lambda(const PseudoscoreSystem& sys) const;
  SolutionPath fit(const PseudoscoreSystem& sys, const FitConfig& cfg,
                   std::span<const double> lambdas) const;
};

}  // namespace addhaz
