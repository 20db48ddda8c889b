#include "addhaz/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "addhaz/parallel.hpp"

namespace addhaz {

namespace {

constexpr Index kCalibrationSubjects = 200000;
constexpr Index kAcceptanceWarmup = 2000;
constexpr double kMinAcceptance = 1e-3;

// Index one past the last nonzero; later AR(1) components cannot affect beta0'Z.
Index effective_length(const Eigen::VectorXd& beta0) {
  for (Index j = beta0.size(); j > 0; --j) {
    if (beta0(j - 1) != 0.0) return j;
  }
  return 0;
}

class Ar1Sampler {
 public:
  explicit Ar1Sampler(double rho) : rho_(rho), innov_(std::sqrt(1.0 - rho * rho)) {}

  template <class Out>
  void draw(Out&& z, Index len, Rng& rng) {
    if (len == 0) return;
    z(0) = normal_(rng);
    for (Index j = 1; j < len; ++j) z(j) = rho_ * z(j - 1) + innov_ * normal_(rng);
  }

 private:
  double rho_;
  double innov_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Linear predictor beta0'Z of one accepted draw (beta0'Z > -1).
double draw_eta(const Eigen::VectorXd& beta0, Index len, Ar1Sampler& sampler,
                Eigen::VectorXd& scratch, Rng& rng) {
  while (true) {
    sampler.draw(scratch, len, rng);
    const double eta = beta0.head(len).dot(scratch.head(len));
    if (eta > -1.0) return eta;
  }
}

Summary summarize_values(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

void require_acceptance(const Eigen::VectorXd& beta0, double rho, Rng& rng) {
  const double rate = acceptance_probability(beta0, rho, kAcceptanceWarmup, rng);
  if (rate < kMinAcceptance) {
    throw std::invalid_argument("beta0'Z > -1 is accepted too rarely (estimated rate " +
                                std::to_string(rate) + ")");
  }
}

}  // namespace

Eigen::VectorXd block_beta0(Index p, int repeats) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  const double pattern[6] = {1.0, 0.0, -1.0, 0.0, 0.0, 0.0};
  for (Index j = 0; j < std::min<Index>(p, 6 * repeats); ++j) beta(j) = pattern[j % 6];
  return beta;
}

void SimStudyConfig::validate() const {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (p < 1) throw std::invalid_argument("p must be at least 1");
  if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [-1, 1]");
  if (beta0.size() != 0 && beta0.size() != p) {
    throw std::invalid_argument("beta0 length does not match p");
  }
  if (!(target_censoring > 0.0 && target_censoring < 1.0)) {
    throw std::invalid_argument("target_censoring must lie in (0, 1)");
  }
  if (weak_effect_count < 0 || !(weak_effect_eps >= 0.0)) {
    throw std::invalid_argument("weak effect settings must be nonnegative");
  }
  const Eigen::VectorXd base = base_beta0();
  if (weak_effect_count > static_cast<Index>((base.array() == 0.0).count())) {
    throw std::invalid_argument("weak_effect_count exceeds the number of zero coefficients");
  }
  if (replicates < 1) throw std::invalid_argument("replicates must be at least 1");
  if (test_n < 2) throw std::invalid_argument("test_n must be at least 2");
}

Eigen::VectorXd SimStudyConfig::base_beta0() const {
  return beta0.size() == 0 ? block_beta0(p, 3) : beta0;
}

TrueCoefficients draw_beta0(const SimStudyConfig& cfg, Rng& rng) {
  TrueCoefficients out;
  out.beta0 = cfg.base_beta0();
  std::vector<Index> zeros;
  for (Index j = 0; j < out.beta0.size(); ++j) {
    (out.beta0(j) != 0.0 ? out.strong_support : zeros).push_back(j);
  }
  if (cfg.weak_effect_count > 0) {
    std::shuffle(zeros.begin(), zeros.end(), rng);
    std::uniform_real_distribution<double> mag(0.0, cfg.weak_effect_eps);
    std::bernoulli_distribution coin(0.5);
    for (Index k = 0; k < cfg.weak_effect_count; ++k) {
      const Index j = zeros[static_cast<std::size_t>(k)];
      const double m = mag(rng);
      out.beta0(j) = coin(rng) ? m : -m;
      if (out.beta0(j) != 0.0) out.weak_support.push_back(j);
    }
    std::sort(out.weak_support.begin(), out.weak_support.end());
  }
  return out;
}

double acceptance_probability(const Eigen::VectorXd& beta0, double rho, Index draws, Rng& rng) {
  const Index len = effective_length(beta0);
  if (len == 0 || draws <= 0) return 1.0;
  Ar1Sampler sampler(rho);
  Eigen::VectorXd z(len);
  Index accepted = 0;
  for (Index i = 0; i < draws; ++i) {
    sampler.draw(z, len, rng);
    if (beta0.head(len).dot(z) > -1.0) ++accepted;
  }
  return static_cast<double>(accepted) / static_cast<double>(draws);
}

SurvivalDataset draw_subjects(const Eigen::VectorXd& beta0, double rho, Index n, double c0,
                              Rng& rng) {
  if (!(c0 > 0.0)) throw std::invalid_argument("censoring bound must be positive");
  const Index p = beta0.size();
  Ar1Sampler sampler(rho);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd z(n, p);
  Eigen::VectorXd row(p);
  std::vector<double> times(static_cast<std::size_t>(n));
  std::vector<int> status(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    double eta = 0.0;
    do {
      sampler.draw(row, p, rng);
      eta = beta0.dot(row);
    } while (!(eta > -1.0));
    z.row(i) = row.transpose();
    const double t = std::exponential_distribution<double>(1.0 + eta)(rng);
    const double c = c0 * unif(rng);
    times[static_cast<std::size_t>(i)] = std::min(t, c);
    status[static_cast<std::size_t>(i)] = t <= c ? 1 : 0;
  }
  if (std::none_of(status.begin(), status.end(), [](int s) { return s == 1; })) {
    throw std::runtime_error("simulated sample has no failures");
  }
  return SurvivalDataset(std::move(times), std::move(status), std::move(z));
}

SimDraw gen_dataset(const SimStudyConfig& cfg, double c0, std::uint64_t replicate_seed) {
  cfg.validate();
  Rng coef_rng(derive_seed(replicate_seed, Stream::kPerturbation));
  TrueCoefficients truth = draw_beta0(cfg, coef_rng);
  Rng rng(derive_seed(replicate_seed, Stream::kDataGen));
  require_acceptance(truth.beta0, cfg.rho, rng);
  SurvivalDataset data = draw_subjects(truth.beta0, cfg.rho, cfg.n, c0, rng);
  return {std::move(data), std::move(truth.beta0), std::move(truth.strong_support),
          std::move(truth.weak_support)};
}

double calibrate_censoring(const SimStudyConfig& cfg) {
  cfg.validate();
  Rng coef_rng(derive_seed(cfg.seed, Stream::kCalibration, 1));
  const Eigen::VectorXd beta0 = draw_beta0(cfg, coef_rng).beta0;
  Rng rng(derive_seed(cfg.seed, Stream::kCalibration, 0));
  require_acceptance(beta0, cfg.rho, rng);

  // Common random numbers: fix (T_i, U_i) once; subject i is censored at
  // bound c exactly when c * U_i < T_i, so the rate is monotone in c.
  const Index len = effective_length(beta0);
  Ar1Sampler sampler(cfg.rho);
  Eigen::VectorXd scratch(std::max<Index>(len, 1));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> ratio(static_cast<std::size_t>(kCalibrationSubjects));
  for (auto& r : ratio) {
    const double eta = len > 0 ? draw_eta(beta0, len, sampler, scratch, rng) : 0.0;
    const double t = std::exponential_distribution<double>(1.0 + eta)(rng);
    const double u = unif(rng);
    r = t / u;  // censored iff c < T / U
  }
  std::sort(ratio.begin(), ratio.end());
  const double total = static_cast<double>(ratio.size());
  auto rate = [&](double c) {
    const auto below = std::upper_bound(ratio.begin(), ratio.end(), c) - ratio.begin();
    return static_cast<double>(static_cast<std::ptrdiff_t>(ratio.size()) - below) / total;
  };

  const double target = cfg.target_censoring;
  constexpr double kMaxBound = 1e3;
  double lo = 0.0;
  double hi = 1.0;
  while (rate(hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxBound) {
      throw std::runtime_error("censoring calibration: no bound up to 1e3 reaches rate " +
                               std::to_string(target));
    }
  }
  while (hi - lo >= 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (rate(mid) > target ? lo : hi) = mid;
  }
  const double c0 = 0.5 * (lo + hi);
  if (std::abs(rate(c0) - target) > 0.005) {
    throw std::runtime_error("censoring calibration did not reach the target within 0.005");
  }
  return c0;
}

SimMetrics eval_metrics(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta0,
                        const std::vector<Index>& strong_support, const SurvivalDataset& test) {
  if (beta_hat.size() != beta0.size() || beta_hat.size() != test.p()) {
    throw std::invalid_argument("eval_metrics: dimension mismatch");
  }
  SimMetrics m;
  m.pe1 = loss(build_system(test), beta_hat);
  const Eigen::VectorXd diff = beta_hat - beta0;
  m.pe2 = (test.covariates() * diff).norm();
  m.l2_loss = diff.norm();
  m.l1_loss = diff.lpNorm<1>();
  m.num_selected = static_cast<Index>((beta_hat.array() != 0.0).count());
  for (Index j = 0; j < beta0.size(); ++j) {
    if (beta0(j) != 0.0 && beta_hat(j) == 0.0) ++m.false_negatives;
  }
  for (Index j : strong_support) {
    if (beta_hat(j) == 0.0) ++m.false_negatives_strong;
  }
  return m;
}

Eigen::VectorXd oracle_fit(const PseudoscoreSystem& sys, const std::vector<Index>& support) {
  if (support.empty()) throw std::invalid_argument("oracle_fit: empty support");
  const auto s = static_cast<Index>(support.size());
  Eigen::MatrixXd vss(s, s);
  Eigen::VectorXd bs(s);
  for (Index r = 0; r < s; ++r) {
    const Index jr = support[static_cast<std::size_t>(r)];
    if (jr < 0 || jr >= sys.p()) throw std::out_of_range("oracle_fit: support index");
    bs(r) = sys.b(jr);
    for (Index c = 0; c < s; ++c) vss(r, c) = sys.v(jr, support[static_cast<std::size_t>(c)]);
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(vss);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-12)) {
    throw std::runtime_error("oracle_fit: V_SS is singular");
  }
  const Eigen::VectorXd sol = llt.solve(bs);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(sys.p());
  for (Index r = 0; r < s; ++r) beta(support[static_cast<std::size_t>(r)]) = sol(r);
  return beta;
}

Eigen::VectorXd oracle_fit(const SurvivalDataset& ds, const std::vector<Index>& support) {
  return oracle_fit(build_system(ds), support);
}

std::vector<double> selection_curve(const SolutionPath& path,
                                     const std::vector<Index>& true_support, Index max_size) {
  std::vector<double> curve(static_cast<std::size_t>(std::max<Index>(max_size, 0)), 0.0);
  for (std::size_t k = 0; k < path.completed(); ++k) {
    const Eigen::VectorXd& beta = path.betas[k];
    const Index size = static_cast<Index>((beta.array() != 0.0).count());
    if (size > max_size) continue;
    double hits = 0.0;
    for (Index j : true_support) {
      if (beta(j) != 0.0) hits += 1.0;
    }
    for (Index m = std::max<Index>(size, 1); m <= max_size; ++m) {
      auto& slot = curve[static_cast<std::size_t>(m - 1)];
      slot = std::max(slot, hits);
    }
  }
  return curve;
}

ReplicateOutcome run_replicate(const SimStudyConfig& cfg, const StudyOptions& options, double c0,
                               int replicate) {
  ReplicateOutcome out;
  out.replicate = replicate;
  out.seed = derive_seed(cfg.seed, Stream::kDataGen, static_cast<std::uint64_t>(replicate));
  try {
    const SimDraw draw = gen_dataset(cfg, c0, out.seed);
    Rng test_rng(derive_seed(out.seed, Stream::kTestGen));
    const SurvivalDataset test = draw_subjects(draw.beta0, cfg.rho, cfg.test_n, c0, test_rng);
    out.censoring_rate =
        1.0 - static_cast<double>(draw.data.num_events()) / static_cast<double>(draw.data.n());

    std::vector<Index> support = draw.strong_support;
    support.insert(support.end(), draw.weak_support.begin(), draw.weak_support.end());
    std::sort(support.begin(), support.end());

    const std::uint64_t fold_seed = derive_seed(out.seed, Stream::kFolds);
    for (const auto& method : options.methods) {
      const CvResult cv = kfold_cv(draw.data, method, options.fit, options.folds, fold_seed);
      MethodOutcome mo;
      mo.lambda_index = select_index(cv, options.rule);
      mo.lambda = cv.lambdas[mo.lambda_index];
      mo.metrics = eval_metrics(cv.full_path.betas[mo.lambda_index], draw.beta0,
                                draw.strong_support, test);
      mo.curve = selection_curve(cv.full_path, support, options.curve_max_size);
      out.methods.push_back(std::move(mo));
    }
    const Eigen::VectorXd oracle = oracle_fit(draw.data, support);
    out.oracle = eval_metrics(oracle, draw.beta0, draw.strong_support, test);
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
    out.methods.clear();
  }
  return out;
}

StudyReport run_study(const SimStudyConfig& cfg, const StudyOptions& options) {
  cfg.validate();
  options.fit.validate();
  if (options.methods.empty()) throw std::invalid_argument("run_study: no methods");
  StudyReport report;
  report.config = cfg;
  report.c0 = calibrate_censoring(cfg);
  for (const auto& m : options.methods) report.labels.push_back(m.label);
  report.replicates.resize(static_cast<std::size_t>(cfg.replicates));
  parallel_for(report.replicates.size(), options.threads, [&](std::size_t r) {
    report.replicates[r] = run_replicate(cfg, options, report.c0, static_cast<int>(r));
  });
  report.summary = summarize(report);
  return report;
}

std::vector<MethodSummary> summarize(const StudyReport& report) {
  std::vector<MethodSummary> rows;
  const std::size_t methods = report.labels.size();
  for (std::size_t m = 0; m <= methods; ++m) {
    MethodSummary row;
    row.label = m < methods ? report.labels[m] : "oracle";
    std::vector<double> pe1, pe2, l2, l1, ns, fn, fns;
    std::vector<double> curve_sum;
    for (const auto& rep : report.replicates) {
      if (!rep.ok) continue;
      const SimMetrics& x = m < methods ? rep.methods[m].metrics : rep.oracle;
      pe1.push_back(x.pe1);
      pe2.push_back(x.pe2);
      l2.push_back(x.l2_loss);
      l1.push_back(x.l1_loss);
      ns.push_back(static_cast<double>(x.num_selected));
      fn.push_back(static_cast<double>(x.false_negatives));
      fns.push_back(static_cast<double>(x.false_negatives_strong));
      if (m < methods) {
        const auto& c = rep.methods[m].curve;
        if (curve_sum.empty()) curve_sum.assign(c.size(), 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) curve_sum[i] += c[i];
      }
    }
    row.replicates = static_cast<int>(pe1.size());
    row.pe1 = summarize_values(pe1);
    row.pe2 = summarize_values(pe2);
    row.l2_loss = summarize_values(l2);
    row.l1_loss = summarize_values(l1);
    row.num_selected = summarize_values(ns);
    row.false_negatives = summarize_values(fn);
    row.false_negatives_strong = summarize_values(fns);
    for (double& v : curve_sum) v /= std::max(row.replicates, 1);
    row.mean_curve = std::move(curve_sum);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace addhaz
