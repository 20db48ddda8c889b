#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "doctest.h"

#include "addhaz/survdata.hpp"
#include "test_support.hpp"

using namespace addhaz;

namespace {

std::string error_message(const std::string& text) {
  std::istringstream in(text);
  try {
    read_csv(in, false);
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("three-row file reads back") {
  std::istringstream in("1.0,1,0.5\n2.0,0,-0.3\n0.7,1,1.1\n");
  const SurvivalDataset ds = read_csv(in, false);
  CHECK(ds.n() == 3);
  CHECK(ds.p() == 1);
  CHECK(ds.times()[2] == 0.7);
  CHECK(ds.status()[1] == 0);
  CHECK(ds.covariates()(1, 0) == -0.3);
  CHECK(ds.feature_names().empty());
  CHECK(ds.num_events() == 2);
  CHECK(ds.max_time() == 2.0);
}

TEST_CASE("header names become feature names") {
  std::istringstream in("time,status,g1,g2\n1,1,0,1\n2,0,1,0\n");
  const SurvivalDataset ds = read_csv(in, true);
  CHECK(ds.feature_names() == std::vector<std::string>{"g1", "g2"});
  CHECK(ds.p() == 2);
}

TEST_CASE("invalid rows are reported by position") {
  const std::string status_msg = error_message("1,1,0\n2,2,0\n3,0,1\n");
  CHECK(status_msg.find("row 2") != std::string::npos);

  std::istringstream bad_status("1,1,0\n2,2,0\n");
  CHECK_THROWS_AS(read_csv(bad_status, false), ValidationError);

  const std::string cell_msg = error_message("1,1,0\n2,0,abc\n");
  CHECK(cell_msg.find("row 2") != std::string::npos);
  CHECK(cell_msg.find("column 3") != std::string::npos);
  std::istringstream bad_cell("1,1,0\n2,0,abc\n");
  CHECK_THROWS_AS(read_csv(bad_cell, false), ParseError);

  std::istringstream negative("1,1,0\n-2,0,1\n");
  CHECK_THROWS_AS(read_csv(negative, false), ValidationError);
  std::istringstream ragged("1,1,0,1\n2,0,1\n");
  CHECK_THROWS_AS(read_csv(ragged, false), ValidationError);
}

TEST_CASE("dataset invariants are enforced on construction") {
  Eigen::MatrixXd z(2, 1);
  z << 1, 2;
  CHECK_THROWS_AS(SurvivalDataset({1, 2}, {0, 0}, z), ValidationError);
  CHECK_THROWS_AS(SurvivalDataset({1}, {1}, Eigen::MatrixXd::Zero(1, 1)), ValidationError);
  CHECK_THROWS_AS(SurvivalDataset({1, 2}, {1, 0}, Eigen::MatrixXd::Zero(3, 1)), ValidationError);
  Eigen::MatrixXd bad = z;
  bad(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(SurvivalDataset({1, 2}, {1, 0}, bad), ValidationError);
  CHECK_THROWS_AS(SurvivalDataset({1, std::numeric_limits<double>::infinity()}, {1, 0}, z),
                  ValidationError);
  CHECK_THROWS_AS(SurvivalDataset({1, 2}, {1, 0}, z, {"a", "b"}), ValidationError);
  CHECK_NOTHROW(SurvivalDataset({0, 2}, {1, 0}, z, {"a"}));
}

TEST_CASE("csv round trip is bit exact") {
  const SurvivalDataset ds = testing_support::random_dataset(40, 4, 11);
  std::stringstream buf;
  write_csv(buf, ds);
  const SurvivalDataset back = read_csv(buf, false);
  CHECK(back.times() == ds.times());
  CHECK(back.status() == ds.status());
  CHECK(back.covariates() == ds.covariates());

  const auto path = std::filesystem::temp_directory_path() / "addhaz_roundtrip.csv";
  const SurvivalDataset named(ds.times(), ds.status(), ds.covariates(), {"a", "b", "c", "d"});
  save_csv(path, named);
  const SurvivalDataset loaded = load_csv(path);
  CHECK(loaded.feature_names() == named.feature_names());
  CHECK(loaded.covariates() == named.covariates());
  std::filesystem::remove(path);
}

TEST_CASE("train/test split sizes, partition and determinism") {
  const SurvivalDataset ds = testing_support::random_dataset(240, 3, 5);
  const auto [train, test] = train_test_split(ds, 2.0 / 3.0, 99);
  CHECK(train.n() == 160);
  CHECK(test.n() == 80);

  // Union equals the input: match rows by their (unique) first covariate.
  std::multiset<double> all;
  for (Index i = 0; i < ds.n(); ++i) all.insert(ds.covariates()(i, 0));
  std::multiset<double> got;
  for (Index i = 0; i < train.n(); ++i) got.insert(train.covariates()(i, 0));
  for (Index i = 0; i < test.n(); ++i) got.insert(test.covariates()(i, 0));
  CHECK(got == all);

  const auto [train2, test2] = train_test_split(ds, 2.0 / 3.0, 99);
  CHECK(train2.covariates() == train.covariates());
  CHECK(test2.times() == test.times());
  const auto [train3, test3] = train_test_split(ds, 2.0 / 3.0, 100);
  CHECK(train3.covariates() != train.covariates());
}

TEST_CASE("split without training events is an error") {
  std::vector<double> times(10);
  std::iota(times.begin(), times.end(), 1.0);
  std::vector<int> status(10, 0);
  status[8] = 1;
  status[9] = 1;
  const SurvivalDataset ds(times, status, Eigen::MatrixXd::Random(10, 2));
  int training_errors = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    try {
      const auto [train, test] = train_test_split(ds, 0.2, seed);
      CHECK(train.n() == 2);
      CHECK(train.num_events() >= 1);
    } catch (const ValidationError& e) {
      if (std::string(e.what()).find("training") != std::string::npos) ++training_errors;
    }
  }
  CHECK(training_errors > 0);
  CHECK(training_errors < 40);

  const SurvivalDataset censored_train({1, 2, 3, 4, 5, 6, 7, 8, 9, 10},
                                       {0, 0, 0, 0, 0, 0, 0, 0, 0, 1},
                                       Eigen::MatrixXd::Random(10, 1));
  int all_errors = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    try {
      train_test_split(censored_train, 0.3, seed);
    } catch (const ValidationError&) {
      ++all_errors;
    }
  }
  CHECK(all_errors == 10);
}
