#include "addhaz/survdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "addhaz/random.hpp"

namespace addhaz {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos
                                         ? std::string_view::npos
                                         : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
    std::ostringstream msg;
    msg << "row " << row << ", column " << col << ": cannot parse '" << cell
        << "' as a number";
    throw ParseError(msg.str());
  }
  return value;
}

}  // namespace

SurvivalDataset::SurvivalDataset(std::vector<double> times, std::vector<int> status,
                                 Eigen::MatrixXd covariates,
                                 std::vector<std::string> feature_names)
    : times_(std::move(times)),
      status_(std::move(status)),
      covariates_(std::move(covariates)),
      feature_names_(std::move(feature_names)) {
  const auto n = times_.size();
  if (status_.size() != n || static_cast<std::size_t>(covariates_.rows()) != n) {
    throw ValidationError("times, status and covariate rows differ in length");
  }
  if (n < 2) throw ValidationError("dataset needs at least 2 observations");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(times_[i]) || times_[i] < 0.0) {
      throw ValidationError("row " + std::to_string(i + 1) +
                            ": time must be finite and nonnegative");
    }
    if (status_[i] != 0 && status_[i] != 1) {
      throw ValidationError("row " + std::to_string(i + 1) + ": status must be 0 or 1");
    }
  }
  if (!covariates_.allFinite()) {
    for (Index i = 0; i < covariates_.rows(); ++i) {
      for (Index j = 0; j < covariates_.cols(); ++j) {
        if (!std::isfinite(covariates_(i, j))) {
          throw ValidationError("row " + std::to_string(i + 1) + ", covariate " +
                                std::to_string(j + 1) + ": non-finite value");
        }
      }
    }
  }
  if (std::none_of(status_.begin(), status_.end(), [](int s) { return s == 1; })) {
    throw ValidationError("dataset has no observed failures");
  }
  if (!feature_names_.empty() &&
      feature_names_.size() != static_cast<std::size_t>(covariates_.cols())) {
    throw ValidationError("feature name count does not match covariate count");
  }
}

Index SurvivalDataset::num_events() const {
  return std::count(status_.begin(), status_.end(), 1);
}

double SurvivalDataset::max_time() const {
  return *std::max_element(times_.begin(), times_.end());
}

SurvivalDataset SurvivalDataset::subset(std::span<const Index> rows) const {
  std::vector<double> t;
  std::vector<int> s;
  Eigen::MatrixXd z(static_cast<Index>(rows.size()), p());
  t.reserve(rows.size());
  s.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Index i = rows[k];
    if (i < 0 || i >= n()) throw std::out_of_range("subset row index out of range");
    t.push_back(times_[i]);
    s.push_back(status_[i]);
    z.row(static_cast<Index>(k)) = covariates_.row(i);
  }
  return SurvivalDataset(std::move(t), std::move(s), std::move(z), feature_names_);
}

SurvivalDataset read_csv(std::istream& in, bool has_header) {
  std::vector<double> times;
  std::vector<int> status;
  std::vector<double> cells;
  std::vector<std::string> names;
  std::size_t width = 0;
  std::size_t row = 0;
  std::string line;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++row;
    std::string_view view = line;
    if (row == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto fields = split_fields(view);
    if (header_pending) {
      header_pending = false;
      if (fields.size() < 3) throw ValidationError("header needs time, status and covariates");
      for (std::size_t c = 2; c < fields.size(); ++c) names.emplace_back(trim(fields[c]));
      width = fields.size();
      continue;
    }
    if (width == 0) width = fields.size();
    if (fields.size() < 3) {
      throw ValidationError("row " + std::to_string(row) +
                            ": expected time, status and at least one covariate");
    }
    if (fields.size() != width) {
      throw ValidationError("row " + std::to_string(row) + ": expected " +
                            std::to_string(width) + " columns, found " +
                            std::to_string(fields.size()));
    }
    const double t = parse_cell(fields[0], row, 1);
    const double s = parse_cell(fields[1], row, 2);
    if (!std::isfinite(t) || t < 0.0) {
      throw ValidationError("row " + std::to_string(row) + ": negative or non-finite time");
    }
    if (s != 0.0 && s != 1.0) {
      throw ValidationError("row " + std::to_string(row) + ": status must be 0 or 1");
    }
    times.push_back(t);
    status.push_back(static_cast<int>(s));
    for (std::size_t c = 2; c < fields.size(); ++c) {
      const double v = parse_cell(fields[c], row, c + 1);
      if (!std::isfinite(v)) {
        throw ValidationError("row " + std::to_string(row) + ", column " +
                              std::to_string(c + 1) + ": non-finite covariate");
      }
      cells.push_back(v);
    }
  }
  if (times.empty()) throw ValidationError("no data rows");
  const Index n = static_cast<Index>(times.size());
  const Index p = static_cast<Index>(width - 2);
  Eigen::MatrixXd z(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) z(i, j) = cells[static_cast<std::size_t>(i * p + j)];
  }
  return SurvivalDataset(std::move(times), std::move(status), std::move(z), std::move(names));
}

SurvivalDataset load_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_csv(in, has_header);
}

SurvivalDataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    std::string_view view = line;
    if (view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;
    std::string_view first = trim(split_fields(view).front());
    if (!first.empty() && first.front() == '+') first.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(first.data(), first.data() + first.size(), value);
    header = first.empty() || ec != std::errc{} || ptr != first.data() + first.size();
    break;
  }
  in.clear();
  in.seekg(0);
  return read_csv(in, header);
}

void write_csv(std::ostream& out, const SurvivalDataset& ds) {
  const auto& names = ds.feature_names();
  if (!names.empty()) {
    out << "time,status";
    for (const auto& name : names) out << ',' << name;
    out << '\n';
  }
  out << std::setprecision(17);
  for (Index i = 0; i < ds.n(); ++i) {
    out << ds.times()[static_cast<std::size_t>(i)] << ',' << ds.status()[static_cast<std::size_t>(i)];
    for (Index j = 0; j < ds.p(); ++j) out << ',' << ds.covariates()(i, j);
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const SurvivalDataset& ds) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  write_csv(out, ds);
  if (!out) throw ParseError("write failed for " + path.string());
}

std::pair<SurvivalDataset, SurvivalDataset> train_test_split(
    const SurvivalDataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
  }
  const Index n = ds.n();
  if (n < 4) throw std::invalid_argument("train_test_split needs at least 4 rows");
  const Index n_train = std::clamp<Index>(
      static_cast<Index>(std::llround(train_fraction * static_cast<double>(n))), 2, n - 2);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(derive_seed(seed, Stream::kSplit));
  std::shuffle(order.begin(), order.end(), rng);
  std::span<const Index> all(order);
  const auto train_rows = all.first(static_cast<std::size_t>(n_train));
  const auto test_rows = all.subspan(static_cast<std::size_t>(n_train));
  auto has_event = [&](std::span<const Index> rows) {
    return std::any_of(rows.begin(), rows.end(),
                       [&](Index i) { return ds.status()[static_cast<std::size_t>(i)] == 1; });
  };
  if (!has_event(train_rows)) throw ValidationError("split leaves no failures in the training set");
  if (!has_event(test_rows)) throw ValidationError("split leaves no failures in the test set");
  return {ds.subset(train_rows), ds.subset(test_rows)};
}

}  // namespace addhaz
