// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "addhaz/cli.hpp"
#include "addhaz/eval.hpp"
#include "addhaz/simulate.hpp"
#include "addhaz/solver.hpp"
#include "test_support.hpp"

using namespace addhaz;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& check) {
  Outcome out;
  try {
    out = check();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  if (!out.pass) ++g_failures;
  std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << title << "): "
            << out.detail << std::endl;
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

const MethodSummary& row(const StudyReport& rep, const std::string& label) {
  for (const auto& r : rep.summary) {
    if (r.label == label) return r;
  }
  throw std::runtime_error("no summary row " + label);
}

PathMethod method(const std::string& label, PenaltySpec spec, std::vector<double> pilots = {}) {
  PathMethod m;
  m.label = label;
  m.penalty = spec;
  m.pilot_shapes = std::move(pilots);
  return m;
}

std::vector<PathMethod> all_methods() {
  return {method("lasso", PenaltySpec::lasso()), method("scad", PenaltySpec::scad()),
          method("mcp", PenaltySpec::mcp()), method("sica", PenaltySpec::sica(0.1), {1.0}),
          method("enet", PenaltySpec::elastic_net())};
}

Outcome prox_oracle_equivalence() {
  const auto start = Clock::now();
  const std::vector<PenaltySpec> specs = {PenaltySpec::lasso(),   PenaltySpec::scad(3.7),
                                          PenaltySpec::mcp(3.7),  PenaltySpec::sica(0.1),
                                          PenaltySpec::sica(0.5), PenaltySpec::sica(1.0),
                                          PenaltySpec::elastic_net(0.5)};
  Rng rng(20240601);
  std::uniform_real_distribution<double> theta(-5.0, 5.0);
  std::uniform_real_distribution<double> lam(0.0, 2.0);
  int draws = 0;
  int objective_misses = 0;
  int argmin_checked = 0;
  int argmin_misses = 0;
  double worst_excess = -1e300;
  for (const auto& spec : specs) {
    for (int i = 0; i < 1000; ++i) {
      const double t0 = theta(rng);
      const double l = lam(rng);
      const double x = univariate_minimize(spec, t0, l);
      const auto oracle = testing_support::prox_oracle(spec, t0, l, 1e-3);
      const double excess =
          testing_support::prox_objective(spec, t0, l, x) - oracle.value;
      worst_excess = std::max(worst_excess, excess);
      if (excess > 1e-10) ++objective_misses;
      if (oracle.gap > 1e-8) {
        ++argmin_checked;
        if (std::abs(x - oracle.argmin) > 1e-6) ++argmin_misses;
      }
      ++draws;
    }
  }
  const double elapsed = seconds_since(start);
  const bool pass = objective_misses == 0 && argmin_misses == 0 && elapsed < 10.0;
  return {pass, std::to_string(draws) + " draws, objective misses " +
                    std::to_string(objective_misses) + " (worst excess " + fmt(worst_excess, 3) +
                    "), argmin misses " + std::to_string(argmin_misses) + " of " +
                    std::to_string(argmin_checked) + " unique, " + fmt(elapsed, 3) + " s"};
}

Outcome unpenalized_equivalence() {
  const auto start = Clock::now();
  SimStudyConfig cfg;
  cfg.n = 300;
  cfg.p = 20;
  const double c0 = calibrate_censoring(cfg);
  FitConfig fit;
  fit.tol = 1e-10;
  fit.max_sweeps = 100000;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SimDraw draw = gen_dataset(cfg, c0, derive_seed(seed, Stream::kDataGen));
    const PseudoscoreSystem sys = build_system(draw.data);
    const Eigen::VectorXd direct = sys.v.ldlt().solve(sys.b);
    const FitResult cd =
        coordinate_descent(sys, PenaltySpec::lasso(), 0.0, Eigen::VectorXd::Zero(cfg.p), fit);
    worst = std::max(worst, (cd.beta - direct).cwiseAbs().maxCoeff());
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-6 && elapsed < 30.0,
          "50 instances, worst sup-norm gap " + fmt(worst, 3) + ", " + fmt(elapsed, 3) + " s"};
}

Outcome monotone_descent() {
  DescentAudit total = descent_audit();
  const std::vector<std::string> suites = {"test_survdata", "test_pseudoscore", "test_penalties",
                                           "test_solver",   "test_crossval",    "test_simulate",
                                           "test_eval",     "test_cli"};
  std::vector<std::string> missing;
  for (const auto& name : suites) {
    std::ifstream in(fs::path(ADDHAZ_AUDIT_DIR) / (name + ".audit"));
    DescentAudit a;
    if (!(in >> a.fits >> a.convex_fits >> a.sweeps >> a.violations >> a.convex_violations)) {
      missing.push_back(name);
      continue;
    }
    total.fits += a.fits;
    total.convex_fits += a.convex_fits;
    total.sweeps += a.sweeps;
    total.violations += a.violations;
    total.convex_violations += a.convex_violations;
  }
  std::string detail = std::to_string(total.convex_fits) + " fits with kappa < 1 (" +
                       std::to_string(total.fits) + " total, " + std::to_string(total.sweeps) +
                       " sweeps), " + std::to_string(total.convex_violations) + " violations";
  if (!missing.empty()) {
    detail += "; no audit from";
    for (const auto& m : missing) detail += " " + m;
    detail += " (run the unit tests first)";
  }
  return {missing.empty() && total.convex_fits > 0 && total.convex_violations == 0, detail};
}

Outcome lambda_max_fixed_point() {
  const std::vector<PenaltySpec> specs = {PenaltySpec::lasso(), PenaltySpec::scad(),
                                          PenaltySpec::mcp(), PenaltySpec::sica(0.1),
                                          PenaltySpec::elastic_net()};
  int nonzero = 0;
  int fits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const PseudoscoreSystem sys =
        testing_support::random_system(3 + static_cast<Index>(seed % 20), 1000 + seed);
    for (const auto& spec : specs) {
      const double lam = lambda_max(sys, spec) * (1.0 + 1e-4);
      const FitResult r =
          coordinate_descent(sys, spec, lam, Eigen::VectorXd::Zero(sys.p()), FitConfig{});
      ++fits;
      if ((r.beta.array() != 0.0).any()) ++nonzero;
    }
  }
  return {nonzero == 0,
          std::to_string(fits) + " fits, " + std::to_string(nonzero) + " nonzero solutions"};
}

StudyOptions study_options(std::vector<PathMethod> methods) {
  StudyOptions opt;
  opt.methods = std::move(methods);
  opt.folds = 10;
  opt.fit.grid_size = 50;
  opt.fit.max_active = 40;
  return opt;
}

Outcome small_study() {
  const auto start = Clock::now();
  SimStudyConfig cfg;
  cfg.n = 200;
  cfg.p = 50;
  cfg.rho = 0.1;
  cfg.replicates = 50;
  cfg.seed = 2024;
  const StudyReport rep = run_study(cfg, study_options(all_methods()));
  const auto& lasso = row(rep, "lasso");
  const auto& sica = row(rep, "sica");
  const auto& oracle = row(rep, "oracle");
  const bool pass = lasso.num_selected.mean >= 14 && lasso.num_selected.mean <= 26 &&
                    sica.num_selected.mean >= 5 && sica.num_selected.mean <= 8.5 &&
                    sica.false_negatives.mean <= 0.4 && sica.l2_loss.mean < lasso.l2_loss.mean &&
                    oracle.l2_loss.mean >= 0.25 && oracle.l2_loss.mean <= 0.65 &&
                    lasso.replicates == 50 && sica.replicates == 50;
  std::string detail = "replicates " + std::to_string(sica.replicates) + ", lasso #S " +
                       fmt(lasso.num_selected.mean) + ", sica #S " + fmt(sica.num_selected.mean) +
                       " FN " + fmt(sica.false_negatives.mean) + ", L2 sica " +
                       fmt(sica.l2_loss.mean) + " lasso " + fmt(lasso.l2_loss.mean) + " oracle " +
                       fmt(oracle.l2_loss.mean) + " [";
  for (const auto& r : rep.summary) {
    if (r.label != "lasso" && r.label != "sica" && r.label != "oracle") {
      detail += r.label + " #S " + fmt(r.num_selected.mean) + " L2 " + fmt(r.l2_loss.mean) + "; ";
    }
  }
  detail += "], " + fmt(seconds_since(start), 3) + " s";
  return {pass, detail};
}

Outcome large_p_study() {
  const auto start = Clock::now();
  SimStudyConfig cfg;
  cfg.n = 500;
  cfg.p = 1000;
  cfg.rho = 0.1;
  cfg.replicates = 10;
  cfg.seed = 77;
  cfg.test_n = 500;
  StudyOptions opt = study_options({method("lasso", PenaltySpec::lasso()),
                                    method("sica", PenaltySpec::sica(0.1), {1.0})});
  opt.fit.max_active = 100;
  const StudyReport rep = run_study(cfg, opt);
  const auto& lasso = row(rep, "lasso");
  const auto& sica = row(rep, "sica");
  const double elapsed = seconds_since(start);
  const bool pass = sica.replicates == 10 && lasso.replicates == 10 &&
                    sica.false_negatives.mean == 0.0 && sica.num_selected.mean <= 12 &&
                    lasso.num_selected.mean >= 30 && elapsed < 1800.0;
  return {pass, "sica #S " + fmt(sica.num_selected.mean) + " FN " +
                    fmt(sica.false_negatives.mean) + ", lasso #S " +
                    fmt(lasso.num_selected.mean) + ", " + fmt(elapsed, 4) + " s"};
}

bool nondecreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) return false;
  }
  return true;
}

Outcome selection_curves() {
  const auto start = Clock::now();
  SimStudyConfig cfg;
  cfg.n = 200;
  cfg.p = 50;
  cfg.rho = 0.5;
  cfg.replicates = 50;
  cfg.seed = 31;
  StudyOptions opt = study_options({method("lasso", PenaltySpec::lasso()),
                                    method("sica", PenaltySpec::sica(0.1), {1.0})});
  opt.curve_max_size = 20;
  const StudyReport rep = run_study(cfg, opt);
  const auto& lasso = row(rep, "lasso");
  const auto& sica = row(rep, "sica");
  const double s6 = sica.mean_curve.at(5);
  const double l6 = lasso.mean_curve.at(5);
  const bool pass = s6 >= l6 && nondecreasing(sica.mean_curve) && nondecreasing(lasso.mean_curve);
  return {pass, "size 6: sica " + fmt(s6) + " lasso " + fmt(l6) + ", nondecreasing sica " +
                    (nondecreasing(sica.mean_curve) ? "yes" : "no") + " lasso " +
                    (nondecreasing(lasso.mean_curve) ? "yes" : "no") + ", " +
                    fmt(seconds_since(start), 3) + " s"};
}

// Root of (1 - e^{-c}) / c = target by bisection; the function decreases in c.
double censoring_root(double target) {
  double lo = 1e-9;
  double hi = 100.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    ((1.0 - std::exp(-mid)) / mid > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Outcome censoring_calibration() {
  SimStudyConfig cfg;
  cfg.p = 10;
  cfg.beta0 = Eigen::VectorXd::Zero(10);
  cfg.target_censoring = 0.25;
  const double c0 = calibrate_censoring(cfg);
  // With unit hazard the censoring probability is P(C < T) = (1 - e^{-c}) / c.
  const double root = censoring_root(0.25);
  const double stated = censoring_root(0.75);
  return {std::abs(c0 - root) <= 0.05,
          "c0 " + fmt(c0, 6) + " vs root " + fmt(root, 6) +
              " of P(C < T) = (1 - e^-c)/c = 0.25; note: the failure-rate form "
              "1 - (1 - e^-c)/c = 0.25 has root " +
              fmt(stated, 4) + " (75% censoring), and 2.26 solves neither equation"};
}

Outcome concentration() {
  SimStudyConfig cfg;
  cfg.p = 5;
  cfg.rho = 0.5;
  cfg.beta0 = block_beta0(5, 1);
  const double c0 = calibrate_censoring(cfg);
  auto system_at = [&](Index n, std::uint64_t seed) {
    cfg.n = n;
    return build_system(gen_dataset(cfg, c0, seed).data);
  };
  const Eigen::MatrixXd limit = system_at(100000, derive_seed(99, Stream::kDataGen)).v;
  auto median_gap = [&](Index n) {
    std::vector<double> gaps;
    for (std::uint64_t r = 0; r < 20; ++r) {
      const PseudoscoreSystem s = system_at(n, derive_seed(1000 + n, Stream::kDataGen, r));
      gaps.push_back((s.v - limit).cwiseAbs().maxCoeff());
    }
    std::nth_element(gaps.begin(), gaps.begin() + 10, gaps.end());
    const double upper = gaps[10];
    const double lower = *std::max_element(gaps.begin(), gaps.begin() + 10);
    return 0.5 * (lower + upper);
  };
  const double m400 = median_gap(400);
  const double m1600 = median_gap(1600);
  const double ratio = m400 / m1600;
  return {ratio >= 1.3 && ratio <= 3.2, "median gap n=400 " + fmt(m400) + ", n=1600 " +
                                            fmt(m1600) + ", ratio " + fmt(ratio)};
}

Outcome logrank_instances() {
  struct Instance {
    std::vector<double> times;
    std::vector<int> status;
    std::vector<int> groups;
    double statistic;
  };
  const double oe = 3.0 - (4.0 / 7.0 + 6.0 / 5.0 + 1.0 / 3.0 + 1.0);
  const double var = 12.0 / 49.0 + 9.0 / 25.0 + 2.0 / 9.0;
  const std::vector<Instance> cases = {
      {{1, 2, 3, 4, 5, 6}, {1, 1, 1, 1, 1, 1}, {0, 0, 0, 1, 1, 1}, 1.85 * 1.85 / 0.6775},
      {{1, 1, 2, 3, 3, 4}, {1, 1, 0, 1, 1, 1}, {0, 1, 0, 1, 0, 1}, (1.0 / 9.0) / (28.0 / 45.0)},
      {{0.5, 1.5, 2, 2, 2.5, 3, 4}, {1, 0, 1, 1, 1, 0, 1}, {1, 0, 0, 0, 1, 1, 0}, oe * oe / var},
  };
  double worst = 0.0;
  for (const auto& c : cases) {
    worst = std::max(worst, std::abs(logrank_test(c.times, c.status, c.groups).statistic -
                                     c.statistic));
  }
  const std::vector<double> t = {0.3, 1.2, 1.2, 2.5, 4.0, 0.3, 1.2, 1.2, 2.5, 4.0};
  const std::vector<int> s = {1, 0, 1, 1, 0, 1, 0, 1, 1, 0};
  const std::vector<int> g = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  const LogRankResult same = logrank_test(t, s, g);
  return {worst <= 1e-10 && same.statistic == 0.0 && same.p_value == 1.0,
          "worst statistic error " + fmt(worst, 3) + ", identical groups statistic " +
              fmt(same.statistic) + " p " + fmt(same.p_value)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / ("addhaz_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto path = [&](const std::string& name) { return (dir / name).string(); };
  auto run = [](std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    if (code != 0) throw std::runtime_error("command failed: " + err.str());
  };
  const std::string conf = path("s.conf");
  std::ofstream(conf) << "n = 150\np = 20\nreplicates = 2\nseed = 8\ntest_n = 200\nfolds = 5\n"
                         "lambda_count = 30\nmethods = lasso, scad, sica\nsica_a = 1, 0.1\n";
  run({"generate", "--config", conf, "--out", path("train.csv"), "--test-out", path("test.csv")});
  const std::vector<std::vector<std::string>> commands = {
      {"generate", "--config", conf, "--replicate", "1"},
      {"fit", "--data", path("train.csv"), "--penalty", "mcp", "--lambda", "0.03"},
      {"path", "--data", path("train.csv"), "--penalty", "sica", "--a", "1", "--a-final", "0.1"},
      {"cv", "--data", path("train.csv"), "--penalty", "scad", "--seed", "4", "--threads", "2"},
      {"evaluate", "--data", path("train.csv"), "--test", path("test.csv"), "--seed", "4"},
      {"simulate", "--config", conf, "--threads", "2"},
  };
  int identical = 0;
  for (const auto& base : commands) {
    std::vector<std::string> docs;
    for (int rep = 0; rep < 2; ++rep) {
      auto args = base;
      args.push_back("--out");
      args.push_back(path("out" + std::to_string(rep)));
      run(args);
      docs.push_back(slurp(path("out" + std::to_string(rep))));
    }
    if (!docs[0].empty() && docs[0] == docs[1]) ++identical;
  }
  fs::remove_all(dir);
  return {identical == static_cast<int>(commands.size()),
          std::to_string(identical) + " of " + std::to_string(commands.size()) +
              " commands byte-identical on repeat"};
}

}  // namespace

int main() {
  report(1, "prox oracle equivalence", prox_oracle_equivalence);
  report(2, "unpenalized equivalence", unpenalized_equivalence);
  report(4, "lambda_max fixed point", lambda_max_fixed_point);
  report(5, "p = 50 study", small_study);
  report(6, "p = 1000 spot check", large_p_study);
  report(7, "selection-curve ordering", selection_curves);
  report(8, "censoring calibration", censoring_calibration);
  report(9, "empirical concentration", concentration);
  report(10, "log-rank correctness", logrank_instances);
  report(11, "cli determinism", cli_determinism);
  // Last, so that the fits of this run are included in the tally.
  report(3, "monotone descent", monotone_descent);
  std::cout << (g_failures == 0 ? "all criteria passed" : std::to_string(g_failures) + " failed")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
