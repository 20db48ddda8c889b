#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace addhaz {

using Index = Eigen::Index;

/// Malformed input text (bad numeric cell, unreadable file).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that parses but violates a domain invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/**
 * Right-censored survival data with time-fixed covariates.
 *
 * Row i holds the observed time X_i = min(T_i, C_i), the failure indicator
 * Delta_i = I(T_i <= C_i) and the covariate row Z_i. Instances are validated
 * on construction and immutable afterwards.
 */
class SurvivalDataset {
 public:
  SurvivalDataset(std::vector<double> times, std::vector<int> status,
                  Eigen::MatrixXd covariates,
                  std::vector<std::string> feature_names = {});

  Index n() const { return static_cast<Index>(times_.size()); }
  Index p() const { return covariates_.cols(); }

  const std::vector<double>& times() const { return times_; }
  const std::vector<int>& status() const { return status_; }
  const Eigen::MatrixXd& covariates() const { return covariates_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  Index num_events() const;
  double max_time() const;

  /// Rows in the given order; the result is validated like any dataset.
  SurvivalDataset subset(std::span<const Index> rows) const;

 private:
  std::vector<double> times_;
  std::vector<int> status_;
  Eigen::MatrixXd covariates_;
  std::vector<std::string> feature_names_;
};

/// Columns: time, status, then p covariates. Errors carry 1-based row/column.
SurvivalDataset read_csv(std::istream& in, bool has_header);
SurvivalDataset load_csv(const std::filesystem::path& path, bool has_header);
/// Treats the first line as a header when its first cell is not numeric.
SurvivalDataset load_csv(const std::filesystem::path& path);

/// Writes with 17 significant digits so that load_csv round-trips exactly.
void write_csv(std::ostream& out, const SurvivalDataset& ds);
void save_csv(const std::filesystem::path& path, const SurvivalDataset& ds);

/// Deterministic random row partition into (train, test).
std::pair<SurvivalDataset, SurvivalDataset> train_test_split(
    const SurvivalDataset& ds, double train_fraction, std::uint64_t seed);

}  // namespace addhaz
