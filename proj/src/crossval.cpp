#include "addhaz/crossval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "addhaz/parallel.hpp"
#include "addhaz/random.hpp"

namespace addhaz {

SelectionRule parse_selection_rule(const std::string& name) {
  if (name == "min") return SelectionRule::kMin;
  if (name == "one_se" || name == "1se") return SelectionRule::kOneSe;
  throw std::invalid_argument("unknown selection rule '" + name + "'");
}

std::string to_string(SelectionRule rule) {
  return rule == SelectionRule::kMin ? "min" : "one_se";
}

std::vector<int> stratified_folds(const SurvivalDataset& ds, int folds, std::uint64_t seed) {
  if (folds < 2 || folds > ds.n()) {
    throw std::invalid_argument("fold count must lie in [2, n], got " + std::to_string(folds));
  }
  std::vector<Index> events;
  std::vector<Index> censored;
  for (Index i = 0; i < ds.n(); ++i) {
    (ds.status()[static_cast<std::size_t>(i)] == 1 ? events : censored).push_back(i);
  }
  Rng rng(derive_seed(seed, Stream::kFolds));
  std::shuffle(events.begin(), events.end(), rng);
  std::shuffle(censored.begin(), censored.end(), rng);
  std::vector<int> label(static_cast<std::size_t>(ds.n()));
  std::size_t dealt = 0;
  for (Index i : events) label[static_cast<std::size_t>(i)] = static_cast<int>(dealt++ % folds);
  for (Index i : censored) label[static_cast<std::size_t>(i)] = static_cast<int>(dealt++ % folds);
  return label;
}

CvResult kfold_cv(const SurvivalDataset& ds, const PathMethod& method, const FitConfig& cfg,
                  int folds, std::uint64_t seed, int threads) {
  cfg.validate();
  CvResult cv;
  cv.fold_assignment = stratified_folds(ds, folds, seed);

  const auto m_count = static_cast<std::size_t>(folds);
  std::vector<std::vector<Index>> held(m_count);
  std::vector<std::vector<Index>> kept(m_count);
  std::vector<Index> fold_events(m_count, 0);
  for (Index i = 0; i < ds.n(); ++i) {
    const auto f = static_cast<std::size_t>(cv.fold_assignment[static_cast<std::size_t>(i)]);
    held[f].push_back(i);
    if (ds.status()[static_cast<std::size_t>(i)] == 1) ++fold_events[f];
    for (std::size_t m = 0; m < m_count; ++m) {
      if (m != f) kept[m].push_back(i);
    }
  }
  const Index total_events = ds.num_events();
  for (std::size_t m = 0; m < m_count; ++m) {
    if (total_events - fold_events[m] == 0) {
      throw ValidationError("fold " + std::to_string(m) +
                            " leaves no failures in its training complement");
    }
  }

  const PseudoscoreSystem full = build_system(ds);
  std::vector<PseudoscoreSystem> train(m_count);
  std::vector<PseudoscoreSystem> test(m_count);
  parallel_for(m_count, threads, [&](std::size_t m) {
    train[m] = build_system(ds, kept[m]);
    test[m] = build_system(ds, held[m]);
  });

  double top = method.top_lambda(full);
  for (const auto& sys : train) top = std::max(top, method.top_lambda(sys));
  cv.lambdas = lambda_grid(top, cfg);
  const std::size_t k_count = cv.lambdas.size();

  cv.fold_losses.assign(m_count, std::vector<double>(k_count, std::numeric_limits<double>::quiet_NaN()));
  parallel_for(m_count + 1, threads, [&](std::size_t task) {
    if (task == m_count) {
      cv.full_path = method.fit(full, cfg, cv.lambdas);
      return;
    }
    const SolutionPath path = method.fit(train[task], cfg, cv.lambdas);
    for (std::size_t k = 0; k < path.completed(); ++k) {
      cv.fold_losses[task][k] = loss(test[task], path.betas[k]);
    }
  });

  cv.cv_scores.assign(k_count, std::numeric_limits<double>::quiet_NaN());
  cv.cv_se.assign(k_count, std::numeric_limits<double>::quiet_NaN());
  const double m_real = static_cast<double>(m_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    double sum = 0.0;
    bool complete = true;
    for (std::size_t m = 0; m < m_count; ++m) {
      const double v = cv.fold_losses[m][k];
      if (std::isnan(v)) {
        complete = false;
        break;
      }
      sum += v;
    }
    if (!complete || k >= cv.full_path.completed()) continue;
    const double mean = sum / m_real;
    double ss = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
      const double d = cv.fold_losses[m][k] - mean;
      ss += d * d;
    }
    cv.cv_scores[k] = mean;
    cv.cv_se[k] = std::sqrt(ss / (m_real - 1.0) / m_real);
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < k_count; ++k) {
    if (!std::isnan(cv.cv_scores[k]) && cv.cv_scores[k] < cv.cv_scores[best]) best = k;
  }
  cv.best_index = best;
  return cv;
}

std::size_t select_index(const CvResult& cv, SelectionRule rule) {
  if (cv.lambdas.empty()) throw std::invalid_argument("empty CV result");
  if (rule == SelectionRule::kMin) return cv.best_index;
  const double bound = cv.cv_scores[cv.best_index] + cv.cv_se[cv.best_index];
  for (std::size_t k = 0; k <= cv.best_index; ++k) {
    if (!std::isnan(cv.cv_scores[k]) && cv.cv_scores[k] <= bound) return k;
  }
  return cv.best_index;
}

double select_lambda(const CvResult& cv, SelectionRule rule) {
  return cv.lambdas[select_index(cv, rule)];
}

}  // namespace addhaz
