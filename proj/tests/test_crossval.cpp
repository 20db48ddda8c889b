#include <cmath>
#include <limits>

#include "doctest.h"

#include "addhaz/crossval.hpp"
#include "addhaz/simulate.hpp"
#include "test_support.hpp"

using namespace addhaz;

namespace {

PathMethod lasso_method() {
  PathMethod m;
  m.label = "lasso";
  m.penalty = PenaltySpec::lasso();
  return m;
}

FitConfig small_grid() {
  FitConfig cfg;
  cfg.grid_size = 30;
  return cfg;
}

CvResult synthetic_cv(std::vector<double> scores, std::vector<double> se) {
  CvResult cv;
  for (std::size_t k = 0; k < scores.size(); ++k) cv.lambdas.push_back(std::pow(0.8, static_cast<double>(k)));
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] < scores[best]) best = k;
  }
  cv.cv_scores = std::move(scores);
  cv.cv_se = std::move(se);
  cv.best_index = best;
  return cv;
}

}  // namespace

TEST_CASE("stratified folds") {
  const SurvivalDataset ds = testing_support::random_dataset(103, 2, 4);
  const auto folds = stratified_folds(ds, 10, 7);
  std::vector<int> sizes(10, 0);
  std::vector<int> events(10, 0);
  for (Index i = 0; i < ds.n(); ++i) {
    const int f = folds[static_cast<std::size_t>(i)];
    REQUIRE(f >= 0);
    REQUIRE(f < 10);
    ++sizes[static_cast<std::size_t>(f)];
    events[static_cast<std::size_t>(f)] += ds.status()[static_cast<std::size_t>(i)];
  }
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  CHECK(*hi - *lo <= 1);
  const auto [elo, ehi] = std::minmax_element(events.begin(), events.end());
  CHECK(*ehi - *elo <= 1);
  CHECK(stratified_folds(ds, 10, 7) == folds);
  CHECK(stratified_folds(ds, 10, 8) != folds);
  CHECK_THROWS(stratified_folds(ds, 1, 7));
  CHECK_THROWS(stratified_folds(ds, 104, 7));
}

TEST_CASE("leave-few-out on twenty subjects gives finite scores") {
  const SurvivalDataset ds = testing_support::random_dataset(20, 3, 15, 6.0);
  REQUIRE(ds.num_events() >= 10);
  const CvResult cv = kfold_cv(ds, lasso_method(), small_grid(), 10, 3);
  REQUIRE(cv.full_path.completed() == cv.lambdas.size());
  for (double s : cv.cv_scores) CHECK(std::isfinite(s));
  CHECK(cv.cv_scores[0] == 0.0);
}

TEST_CASE("scores are fold means of held-out losses of complement-only fits") {
  const SurvivalDataset ds = testing_support::random_dataset(90, 6, 33);
  for (const auto& method : {lasso_method(), PathMethod{"sica", PenaltySpec::sica(0.1), {1.0}}}) {
    const FitConfig cfg = small_grid();
    const CvResult cv = kfold_cv(ds, method, cfg, 5, 19);
    for (int m = 0; m < 5; ++m) {
      std::vector<Index> kept;
      std::vector<Index> held;
      for (Index i = 0; i < ds.n(); ++i) {
        (cv.fold_assignment[static_cast<std::size_t>(i)] == m ? held : kept).push_back(i);
      }
      // Fit on a dataset that physically lacks the fold's rows.
      const SolutionPath path = method.fit(build_system(ds.subset(kept)), cfg, cv.lambdas);
      const PseudoscoreSystem test = build_system(ds.subset(held));
      for (std::size_t k = 0; k < path.completed(); ++k) {
        const double l = loss(test, path.betas[k]);
        CHECK(std::abs(cv.fold_losses[static_cast<std::size_t>(m)][k] - l) <= 1e-10);
      }
    }
    for (std::size_t k = 0; k < cv.lambdas.size(); ++k) {
      double sum = 0.0;
      for (int m = 0; m < 5; ++m) sum += cv.fold_losses[static_cast<std::size_t>(m)][k];
      CHECK(std::abs(cv.cv_scores[k] - sum / 5.0) <= 1e-10);
    }
    CHECK(cv.cv_scores[0] == 0.0);
    CHECK(cv.full_path.nonzeros(0) == 0);
  }
}

TEST_CASE("deterministic replay and thread independence") {
  const SurvivalDataset ds = testing_support::random_dataset(80, 5, 2);
  const CvResult a = kfold_cv(ds, lasso_method(), small_grid(), 4, 11);
  const CvResult b = kfold_cv(ds, lasso_method(), small_grid(), 4, 11, 3);
  CHECK(a.lambdas == b.lambdas);
  CHECK(a.cv_scores == b.cv_scores);
  CHECK(a.cv_se == b.cv_se);
  CHECK(a.best_index == b.best_index);
  CHECK(a.fold_assignment == b.fold_assignment);
}

TEST_CASE("fold without training failures is rejected before fitting") {
  std::vector<double> times = {1, 2, 3, 4, 5, 6};
  std::vector<int> status = {0, 0, 0, 1, 0, 0};
  const SurvivalDataset ds(times, status, Eigen::MatrixXd::Random(6, 2));
  CHECK_THROWS_AS(kfold_cv(ds, lasso_method(), small_grid(), 2, 1), ValidationError);
}

TEST_CASE("selection rules on constructed curves") {
  const CvResult down = synthetic_cv({0, -1, -2, -3, -4}, {0, 0.1, 0.1, 0.1, 0.1});
  CHECK(select_index(down, SelectionRule::kMin) == 4);
  CHECK(select_lambda(down, SelectionRule::kMin) == down.lambdas[4]);

  const CvResult flat = synthetic_cv({0, 0, 0, 0}, {0, 0, 0, 0});
  CHECK(select_index(flat, SelectionRule::kMin) == 0);
  CHECK(select_index(flat, SelectionRule::kOneSe) == 0);

  std::vector<double> v;
  for (int k = 0; k < 15; ++k) v.push_back(std::abs(k - 7) * 0.1 - 1.0);
  const CvResult vee = synthetic_cv(v, std::vector<double>(15, 0.25));
  CHECK(select_index(vee, SelectionRule::kMin) == 7);
  CHECK(select_lambda(vee, SelectionRule::kMin) == vee.lambdas[7]);
  // one-SE: largest lambda with score <= -1 + 0.25, i.e. |k - 7| <= 2
  CHECK(select_index(vee, SelectionRule::kOneSe) == 5);
  CHECK(parse_selection_rule("one_se") == SelectionRule::kOneSe);
  CHECK_THROWS(parse_selection_rule("max"));
}

TEST_CASE("pure noise rarely selects a model") {
  SimStudyConfig cfg;
  cfg.n = 200;
  cfg.p = 10;
  cfg.beta0 = Eigen::VectorXd::Zero(10);
  const double c0 = calibrate_censoring(cfg);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SimDraw draw = gen_dataset(cfg, c0, derive_seed(seed, Stream::kDataGen));
    const CvResult cv = kfold_cv(draw.data, lasso_method(), FitConfig{}, 10, seed);
    const std::size_t best = cv.best_index;
    const bool small = cv.full_path.nonzeros(best) <= 10;
    const bool near = cv.cv_scores[0] <= cv.cv_scores[best] + 2.0 * cv.cv_se[best];
    if (small && near) ++good;
  }
  MESSAGE("pure-noise cases passing: " << good << " of 20");
  CHECK(good >= 16);
}
