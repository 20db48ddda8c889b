#pragma once

#include <span>

#include <Eigen/Core>

#include "addhaz/survdata.hpp"

namespace addhaz {

/**
 * Quadratic summary of the additive-hazards pseudoscore U(beta) = b - V beta.
 *
 *   V = (1/n) sum_i int_0^tau Y_i(t) (Z_i - Zbar(t))^{x2} dt
 *   b = (1/n) sum_i int_0^tau (Z_i - Zbar(t)) dN_i(t)
 *   W = (1/n) sum_i int_0^tau (Z_i - Zbar(t))^{x2} dN_i(t)
 *
 * Everything downstream (loss, coordinate descent, cross-validation) works
 * from this object alone.
 */
struct PseudoscoreSystem {
  Eigen::MatrixXd v;
  Eigen::VectorXd b;
  Eigen::MatrixXd w;
  double tau = 0.0;
  Index n = 0;
  /// V_jj, cached.
  Eigen::VectorXd diag;
  /// true where V_jj is zero relative to the covariate's scale; such
  /// coordinates are excluded from coordinate descent.
  std::vector<bool> degenerate;

  Index p() const { return b.size(); }
};

PseudoscoreSystem build_system(const SurvivalDataset& ds);

/// System built from the listed rows only (fold construction for CV).
PseudoscoreSystem build_system(const SurvivalDataset& ds, std::span<const Index> rows);

/// L(beta) = beta' V beta / 2 - b' beta
double loss(const PseudoscoreSystem& sys, const Eigen::Ref<const Eigen::VectorXd>& beta);

/// U(beta) = b - V beta, the negative gradient of loss().
Eigen::VectorXd score(const PseudoscoreSystem& sys, const Eigen::Ref<const Eigen::VectorXd>& beta);

}  // namespace addhaz
