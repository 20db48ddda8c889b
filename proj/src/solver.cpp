#include "addhaz/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace addhaz {

namespace {

constexpr int kCacheRefreshSweeps = 50;

std::atomic<std::uint64_t> g_fits{0};
std::atomic<std::uint64_t> g_convex_fits{0};
std::atomic<std::uint64_t> g_sweeps{0};
std::atomic<std::uint64_t> g_violations{0};
std::atomic<std::uint64_t> g_convex_violations{0};

double penalty_sum(const PseudoscoreSystem& sys, const PenaltySpec& spec, double lambda,
                   const Eigen::Ref<const Eigen::VectorXd>& beta) {
  double total = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0) total += sys.diag(j) * penalty_value(spec, std::abs(beta(j)), lambda);
  }
  return total;
}

std::vector<Index> active_set(const Eigen::VectorXd& beta) {
  std::vector<Index> s;
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0) s.push_back(j);
  }
  return s;
}

void record_point(SolutionPath& path, const PseudoscoreSystem& sys, const PenaltySpec& spec,
                  double lambda, FitResult&& fit) {
  const auto active = active_set(fit.beta);
  path.convexity_warnings.push_back(
      !active.empty() && !restricted_convexity_check(sys, spec, lambda, active));
  path.objective_values.push_back(fit.diagnostics.objective);
  path.sweeps_used.push_back(fit.diagnostics.sweeps);
  path.converged_flags.push_back(fit.diagnostics.converged);
  path.coordinatewise_convex.push_back(fit.diagnostics.coordinatewise_convex);
  path.betas.push_back(std::move(fit.beta));
}

bool exceeds_cap(const FitConfig& cfg, const Eigen::VectorXd& beta) {
  return cfg.max_active && static_cast<Index>((beta.array() != 0.0).count()) > *cfg.max_active;
}

std::vector<Index> excluded_coordinates(const PseudoscoreSystem& sys) {
  std::vector<Index> out;
  for (Index j = 0; j < sys.p(); ++j) {
    if (sys.degenerate[static_cast<std::size_t>(j)]) out.push_back(j);
  }
  return out;
}

}  // namespace

void FitConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be at least 1");
  if (grid_size < 1) throw std::invalid_argument("grid size must be at least 1");
  if (!(grid_ratio > 0.0 && grid_ratio < 1.0)) {
    throw std::invalid_argument("grid ratio must lie in (0, 1)");
  }
  if (max_active && *max_active < 0) throw std::invalid_argument("max_active must be >= 0");
}

DescentAudit descent_audit() {
  return {g_fits.load(), g_convex_fits.load(), g_sweeps.load(), g_violations.load(),
          g_convex_violations.load()};
}

void reset_descent_audit() {
  g_fits = 0;
  g_convex_fits = 0;
  g_sweeps = 0;
  g_violations = 0;
  g_convex_violations = 0;
}

Index SolutionPath::nonzeros(std::size_t k) const {
  return static_cast<Index>((betas.at(k).array() != 0.0).count());
}

double weighted_objective(const PseudoscoreSystem& sys, const PenaltySpec& spec, double lambda,
                          const Eigen::Ref<const Eigen::VectorXd>& beta) {
  return loss(sys, beta) + penalty_sum(sys, spec, lambda, beta);
}

double lambda_max(const PseudoscoreSystem& sys) {
  double best = -1.0;
  for (Index j = 0; j < sys.p(); ++j) {
    if (sys.degenerate[static_cast<std::size_t>(j)]) continue;
    best = std::max(best, std::abs(sys.b(j)) / sys.diag(j));
  }
  if (best < 0.0) throw std::invalid_argument("lambda_max: every V_jj is zero");
  return best;
}

double lambda_max(const PseudoscoreSystem& sys, const PenaltySpec& spec) {
  const double zmax = lambda_max(sys);
  if (zmax == 0.0) return 0.0;
  if (zero_threshold(spec, zmax) >= zmax) {
    return spec.kind() == PenaltyKind::kElasticNet ? zmax / spec.enet_alpha() : zmax;
  }
  if (spec.kind() == PenaltyKind::kElasticNet) return zmax / spec.enet_alpha();
  // SICA with a large lambda: the zero threshold falls below lambda itself.
  double lo = zmax;
  double hi = 2.0 * zmax;
  while (zero_threshold(spec, hi) < zmax) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (zero_threshold(spec, mid) >= zmax ? hi : lo) = mid;
  }
  return hi;
}

std::vector<double> lambda_grid(double top, const FitConfig& cfg) {
  cfg.validate();
  if (!(top >= 0.0) || !std::isfinite(top)) throw std::invalid_argument("invalid lambda_max");
  if (top == 0.0) return {0.0};
  std::vector<double> grid(static_cast<std::size_t>(cfg.grid_size));
  grid[0] = top;
  const double k_last = static_cast<double>(cfg.grid_size - 1);
  for (int k = 1; k < cfg.grid_size; ++k) {
    grid[static_cast<std::size_t>(k)] = top * std::pow(cfg.grid_ratio, k / k_last);
  }
  return grid;
}

FitResult coordinate_descent(const PseudoscoreSystem& sys, const PenaltySpec& spec, double lambda,
                             const Eigen::Ref<const Eigen::VectorXd>& warm_start,
                             const FitConfig& cfg) {
  cfg.validate();
  const Index p = sys.p();
  if (warm_start.size() != p) throw std::invalid_argument("warm start has the wrong length");
  if (!warm_start.allFinite()) throw std::invalid_argument("warm start must be finite");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and nonnegative");
  }

  FitResult out;
  auto& diag = out.diagnostics;
  Eigen::VectorXd& beta = out.beta;
  beta = warm_start;
  diag.coordinatewise_convex = max_concavity(spec, lambda) < 1.0;

  std::vector<Index> eligible;
  eligible.reserve(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    if (!sys.degenerate[static_cast<std::size_t>(j)]) {
      eligible.push_back(j);
    } else if (beta(j) != 0.0) {
      diag.frozen.push_back(j);
    }
  }

  Eigen::VectorXd vb = sys.v * beta;
  auto objective = [&] {
    return 0.5 * beta.dot(vb) - sys.b.dot(beta) + penalty_sum(sys, spec, lambda, beta);
  };
  auto update = [&](Index j) {
    const double vjj = sys.diag(j);
    const double r = sys.b(j) - (vb(j) - vjj * beta(j));
    const double next = univariate_minimize(spec, r / vjj, lambda);
    const double delta = next - beta(j);
    if (delta != 0.0) {
      vb.noalias() += delta * sys.v.col(j);
      beta(j) = next;
    }
    return std::abs(delta);
  };

  double current = objective();
  diag.sweep_objectives.push_back(current);
  auto finish_sweep = [&] {
    ++diag.sweeps;
    if (diag.sweeps % kCacheRefreshSweeps == 0) vb.noalias() = sys.v * beta;
    const double next = objective();
    if (next > current + FitDiagnostics::kDescentSlack) ++diag.monotone_violations;
    current = next;
    diag.sweep_objectives.push_back(current);
  };

  std::vector<Index> active;
  while (diag.sweeps < cfg.max_sweeps) {
    double change = 0.0;
    for (Index j : eligible) change = std::max(change, update(j));
    finish_sweep();
    if (change < cfg.tol) {
      diag.converged = true;
      break;
    }
    if (diag.sweeps < 2) continue;

    // Iterate on the current nonzeros, then return to a full sweep to pick
    // up any coordinate that wants to enter.
    active.clear();
    for (Index j : eligible) {
      if (beta(j) != 0.0) active.push_back(j);
    }
    while (diag.sweeps < cfg.max_sweeps) {
      double inner = 0.0;
      for (Index j : active) inner = std::max(inner, update(j));
      finish_sweep();
      if (inner < cfg.tol) break;
    }
  }

  diag.objective = current;
  g_fits.fetch_add(1, std::memory_order_relaxed);
  g_sweeps.fetch_add(static_cast<std::uint64_t>(diag.sweeps), std::memory_order_relaxed);
  g_violations.fetch_add(static_cast<std::uint64_t>(diag.monotone_violations),
                         std::memory_order_relaxed);
  if (diag.coordinatewise_convex) {
    g_convex_fits.fetch_add(1, std::memory_order_relaxed);
    g_convex_violations.fetch_add(static_cast<std::uint64_t>(diag.monotone_violations),
                                  std::memory_order_relaxed);
  }
  return out;
}

SolutionPath solve_path(const PseudoscoreSystem& sys, const PenaltySpec& spec,
                        const FitConfig& cfg) {
  const auto grid = lambda_grid(lambda_max(sys, spec), cfg);
  return solve_path(sys, spec, cfg, grid);
}

SolutionPath solve_path(const PseudoscoreSystem& sys, const PenaltySpec& spec,
                        const FitConfig& cfg, std::span<const double> lambdas) {
  cfg.validate();
  if (lambdas.empty()) throw std::invalid_argument("empty lambda grid");
  SolutionPath path;
  path.penalty = spec;
  path.lambdas.assign(lambdas.begin(), lambdas.end());
  path.excluded = excluded_coordinates(sys);
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(sys.p());
  for (double lambda : lambdas) {
    auto fit = coordinate_descent(sys, spec, lambda, warm, cfg);
    warm = fit.beta;
    const bool stop = exceeds_cap(cfg, fit.beta);
    record_point(path, sys, spec, lambda, std::move(fit));
    if (stop) {
      path.early_stopped = path.completed() < path.lambdas.size();
      break;
    }
  }
  return path;
}

SolutionPath solve_path_sica_staged(const PseudoscoreSystem& sys,
                                    std::span<const double> shapes, const FitConfig& cfg) {
  if (shapes.empty()) throw std::invalid_argument("staged SICA needs at least one shape");
  double top = 0.0;
  for (double a : shapes) top = std::max(top, lambda_max(sys, PenaltySpec::sica(a)));
  const auto grid = lambda_grid(top, cfg);
  return solve_path_sica_staged(sys, shapes, cfg, grid);
}

SolutionPath solve_path_sica_staged(const PseudoscoreSystem& sys,
                                    std::span<const double> shapes, const FitConfig& cfg,
                                    std::span<const double> lambdas) {
  if (shapes.empty()) throw std::invalid_argument("staged SICA needs at least one shape");
  for (std::size_t s = 1; s < shapes.size(); ++s) {
    if (!(shapes[s] <= shapes[s - 1])) {
      throw std::invalid_argument("SICA stage shapes must be nonincreasing");
    }
  }
  SolutionPath path = solve_path(sys, PenaltySpec::sica(shapes[0]), cfg, lambdas);
  for (std::size_t s = 1; s < shapes.size(); ++s) {
    if (shapes[s] == shapes[s - 1]) continue;
    const PenaltySpec spec = PenaltySpec::sica(shapes[s]);
    const SolutionPath plain = solve_path(sys, spec, cfg, lambdas);
    SolutionPath next;
    next.penalty = spec;
    next.lambdas = path.lambdas;
    next.excluded = path.excluded;
    for (std::size_t k = 0; k < path.completed(); ++k) {
      auto fit = coordinate_descent(sys, spec, path.lambdas[k], path.betas[k], cfg);
      if (k > 0) {
        // Pilot warm starts alone can land in a worse local minimum than plain
        // continuation in lambda, so both are tried and the lower objective kept.
        auto along = coordinate_descent(sys, spec, path.lambdas[k], next.betas[k - 1], cfg);
        if (along.diagnostics.objective < fit.diagnostics.objective) fit = std::move(along);
      }
      if (k < plain.completed() && plain.objective_values[k] < fit.diagnostics.objective) {
        fit = coordinate_descent(sys, spec, path.lambdas[k], plain.betas[k], cfg);
      }
      const bool stop = exceeds_cap(cfg, fit.beta);
      record_point(next, sys, spec, path.lambdas[k], std::move(fit));
      if (stop) break;
    }
    next.early_stopped = next.completed() < next.lambdas.size();
    path = std::move(next);
  }
  path.stage_shapes.assign(shapes.begin(), shapes.end());
  return path;
}

bool restricted_convexity_check(const PseudoscoreSystem& sys, const PenaltySpec& spec,
                                double lambda, std::span<const Index> active) {
  if (active.empty()) throw std::invalid_argument("active set must be nonempty");
  for (Index j : active) {
    if (j < 0 || j >= sys.p()) throw std::out_of_range("active index out of range");
  }
  const double kappa = max_concavity(spec, lambda);
  // kappa = 0 reduces the condition to V_SS being PSD, which V always is.
  if (kappa == 0.0) return true;
  const auto s = static_cast<Index>(active.size());
  Eigen::MatrixXd sub(s, s);
  double max_diag = 0.0;
  for (Index r = 0; r < s; ++r) {
    max_diag = std::max(max_diag, sys.diag(active[static_cast<std::size_t>(r)]));
    for (Index c = 0; c < s; ++c) {
      sub(r, c) = sys.v(active[static_cast<std::size_t>(r)], active[static_cast<std::size_t>(c)]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= kappa * max_diag;
}

std::vector<double> PathMethod::shape_schedule() const {
  std::vector<double> out = pilot_shapes;
  out.push_back(penalty.shape_a());
  return out;
}

double PathMethod::top_lambda(const PseudoscoreSystem& sys) const {
  if (penalty.kind() != PenaltyKind::kSICA || pilot_shapes.empty()) {
    return lambda_max(sys, penalty);
  }
  double top = 0.0;
  for (double a : shape_schedule()) top = std::max(top, lambda_max(sys, PenaltySpec::sica(a)));
  return top;
}

SolutionPath PathMethod::fit(const PseudoscoreSystem& sys, const FitConfig& cfg,
                             std::span<const double> lambdas) const {
  if (penalty.kind() == PenaltyKind::kSICA && !pilot_shapes.empty()) {
    const auto shapes = shape_schedule();
    return solve_path_sica_staged(sys, shapes, cfg, lambdas);
  }
  return solve_path(sys, penalty, cfg, lambdas);
}

}  // namespace addhaz
