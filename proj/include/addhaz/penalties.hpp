#pragma once

#include <string>

namespace addhaz {

enum class PenaltyKind { kL1, kSCAD, kMCP, kSICA, kElasticNet };

/// Lower-case CLI name ("lasso", "scad", "mcp", "sica", "enet").
std::string to_string(PenaltyKind kind);
PenaltyKind parse_penalty_kind(const std::string& name);

/**
 * A penalty p_lambda(theta) = lambda * rho_lambda(theta) from the folded
 * concave family, plus the elastic net.
 *
 * Shape constraints are enforced by the constructor: SCAD needs a > 2, MCP
 * a > 1, SICA a > 0, elastic net alpha in (0, 1].
 */
class PenaltySpec {
 public:
  static constexpr double kDefaultConcaveA = 3.7;
  static constexpr double kDefaultSicaA = 1.0;
  static constexpr double kDefaultEnetAlpha = 0.5;

  PenaltySpec(PenaltyKind kind, double shape_a, double enet_alpha);

  static PenaltySpec lasso();
  static PenaltySpec scad(double a = kDefaultConcaveA);
  static PenaltySpec mcp(double a = kDefaultConcaveA);
  static PenaltySpec sica(double a = kDefaultSicaA);
  static PenaltySpec elastic_net(double alpha = kDefaultEnetAlpha);

  PenaltyKind kind() const { return kind_; }
  double shape_a() const { return shape_a_; }
  double enet_alpha() const { return enet_alpha_; }

  /// Same family with a different shape parameter (used for staged SICA).
  PenaltySpec with_shape(double a) const { return {kind_, a, enet_alpha_}; }

  std::string describe() const;

 private:
  PenaltyKind kind_;
  double shape_a_;
  double enet_alpha_;
};

/// p_lambda(theta) for theta >= 0.
double penalty_value(const PenaltySpec& spec, double theta, double lambda);

/// p_lambda'(theta) for theta > 0.
double penalty_derivative(const PenaltySpec& spec, double theta, double lambda);

/// kappa(p_lambda) = sup_{0<t1<t2} -(p'(t2) - p'(t1)) / (t2 - t1).
double max_concavity(const PenaltySpec& spec, double lambda);

/**
 * Global minimizer of  (theta - theta0)^2 / 2 + p_lambda(|theta|).
 *
 * This is the coordinate-descent kernel: with the penalty weighted by V_jj the
 * coordinate subproblem is V_jj times this unit-weight problem at
 * theta0 = r_j / V_jj. Ties between zero and a nonzero minimum go to zero.
 */
double univariate_minimize(const PenaltySpec& spec, double theta0, double lambda);

/**
 * Largest |theta0| for which univariate_minimize returns exactly zero.
 * For L1/SCAD/MCP this is lambda; elastic net lambda*alpha; SICA
 * min(lambda (a+1)/a, min_{t>0} t/2 + lambda (a+1)/(a+t)).
 */
double zero_threshold(const PenaltySpec& spec, double lambda);

}  // namespace addhaz
