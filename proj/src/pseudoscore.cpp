#include "addhaz/pseudoscore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace addhaz {

namespace {

// Relative size below which V_jj is treated as an exact zero.
constexpr double kDegenerateRel = 1e-13;

void check_dim(const PseudoscoreSystem& sys, Index len) {
  if (len != sys.p()) {
    throw std::invalid_argument("coefficient vector has length " + std::to_string(len) +
                                ", system has p = " + std::to_string(sys.p()));
  }
}

}  // namespace

PseudoscoreSystem build_system(const SurvivalDataset& ds) {
  std::vector<Index> rows(static_cast<std::size_t>(ds.n()));
  std::iota(rows.begin(), rows.end(), Index{0});
  return build_system(ds, rows);
}

PseudoscoreSystem build_system(const SurvivalDataset& ds, std::span<const Index> rows) {
  if (rows.empty()) throw std::invalid_argument("build_system: empty row set");
  const Index n = static_cast<Index>(rows.size());
  const Index p = ds.p();
  const auto& times = ds.times();
  const auto& status = ds.status();

  // V, b and W are invariant to a common shift of the covariates. Shifting by
  // the first selected row keeps constant columns exactly zero.
  const Eigen::RowVectorXd shift = ds.covariates().row(rows.front());
  Eigen::MatrixXd z(n, p);
  Eigen::VectorXd x(n);
  std::vector<int> delta(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    const Index i = rows[static_cast<std::size_t>(k)];
    z.row(k) = ds.covariates().row(i) - shift;
    x(k) = times[static_cast<std::size_t>(i)];
    delta[static_cast<std::size_t>(k)] = status[static_cast<std::size_t>(i)];
  }

  // Descending by time; sweeping from the largest time grows the risk set
  // {i : X_i >= t} one tie block at a time.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index c) { return x(a) > x(c); });

  // With Y_i(t) = I(X_i >= t) and distinct times t_1 < ... < t_m (t_0 = 0):
  //   sum_k (t_k - t_{k-1}) S2_k = sum_i X_i Z_i Z_i'
  //   V = (1/n) [sum_i X_i Z_i Z_i' - sum_k (t_k - t_{k-1}) S1_k S1_k' / S0_k]
  // The second term is accumulated as A'A with rows sqrt(dt_k / S0_k) S1_k.
  std::vector<double> block_time;
  Eigen::MatrixXd s1_rows(n, p);
  std::vector<double> s0_at;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
  double s0 = 0.0;
  Eigen::MatrixXd event_resid(ds.num_events() > 0 ? n : 0, p);
  Index n_event_rows = 0;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);

  std::size_t pos = 0;
  Index m = 0;
  while (pos < order.size()) {
    const double t = x(order[pos]);
    std::size_t end = pos;
    while (end < order.size() && x(order[end]) == t) {
      const Index i = order[end];
      s1 += z.row(i).transpose();
      s0 += 1.0;
      ++end;
    }
    // risk set at t now complete (includes the tie block itself)
    const Eigen::VectorXd mean = s1 / s0;
    for (std::size_t q = pos; q < end; ++q) {
      const Index i = order[q];
      if (delta[static_cast<std::size_t>(i)] == 1) {
        event_resid.row(n_event_rows) = z.row(i) - mean.transpose();
        b += event_resid.row(n_event_rows).transpose();
        ++n_event_rows;
      }
    }
    block_time.push_back(t);
    s0_at.push_back(s0);
    s1_rows.row(m) = s1.transpose();
    ++m;
    pos = end;
  }

  // block_time is descending; interval lengths are t_k - t_{k-1} in ascending order.
  Eigen::MatrixXd a(m, p);
  for (Index k = 0; k < m; ++k) {
    const double t_hi = block_time[static_cast<std::size_t>(k)];
    const double t_lo = (k + 1 < m) ? block_time[static_cast<std::size_t>(k + 1)] : 0.0;
    const double weight = std::sqrt(std::max(t_hi - t_lo, 0.0) / s0_at[static_cast<std::size_t>(k)]);
    a.row(k) = weight * s1_rows.row(k);
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  PseudoscoreSystem sys;
  const Eigen::MatrixXd zx = x.asDiagonal() * z;
  Eigen::MatrixXd v(p, p);
  v.noalias() = z.transpose() * zx;
  v.noalias() -= a.transpose() * a;
  v *= inv_n;
  sys.v = 0.5 * (v + v.transpose());

  const auto er = event_resid.topRows(n_event_rows);
  Eigen::MatrixXd w(p, p);
  w.noalias() = er.transpose() * er;
  sys.w = inv_n * w;

  sys.b = inv_n * b;
  sys.tau = x.maxCoeff();
  sys.n = n;
  sys.diag = sys.v.diagonal();

  sys.degenerate.assign(static_cast<std::size_t>(p), false);
  const Eigen::VectorXd scale = inv_n * (z.array().square().colwise() * x.array()).colwise().sum().transpose();
  for (Index j = 0; j < p; ++j) {
    if (!(sys.diag(j) > kDegenerateRel * scale(j))) {
      sys.degenerate[static_cast<std::size_t>(j)] = true;
    }
  }
  return sys;
}

double loss(const PseudoscoreSystem& sys, const Eigen::Ref<const Eigen::VectorXd>& beta) {
  check_dim(sys, beta.size());
  return 0.5 * beta.dot(sys.v * beta) - sys.b.dot(beta);
}

Eigen::VectorXd score(const PseudoscoreSystem& sys, const Eigen::Ref<const Eigen::VectorXd>& beta) {
  check_dim(sys, beta.size());
  return sys.b - sys.v * beta;
}

}  // namespace addhaz
