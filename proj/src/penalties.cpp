#include "addhaz/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace addhaz {

namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

double soft_threshold(double z, double t) {
  const double mag = std::abs(z) - t;
  return mag > 0.0 ? sign(z) * mag : 0.0;
}

void require_nonnegative(double theta, double lambda) {
  if (!(theta >= 0.0) || !(lambda >= 0.0)) {
    throw std::invalid_argument("penalty arguments must be nonnegative");
  }
}

double sica_objective(double t, double z, double lambda, double a) {
  return 0.5 * (t - z) * (t - z) + lambda * (a + 1.0) * t / (a + t);
}

// Largest positive root of (t - z)(a + t)^2 + lambda a (a + 1) on (0, z),
// bracketed because the cubic is negative at 0 and positive at z.
double sica_bracketed_root(double z, double lambda, double a) {
  auto f = [&](double t) { return (t - z) * (a + t) * (a + t) + lambda * a * (a + 1.0); };
  double lo = 0.0;
  double hi = z;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + z); ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Closed-form SICA thresholding via the trigonometric cubic roots.
double sica_minimize(double theta0, double lambda, double a) {
  const double z = std::abs(theta0);
  const double c2 = 2.0 * a - z;
  const double c1 = a * a - 2.0 * a * z;
  const double c0 = lambda * a * (a + 1.0) - a * a * z;
  const double q = (c2 * c2 - 3.0 * c1) / 9.0;
  const double r = (2.0 * c2 * c2 * c2 - 9.0 * c1 * c2 + 27.0 * c0) / 54.0;
  const double q3 = q * q * q;

  double t = 0.0;
  if (q3 > r * r) {
    const double sq = std::sqrt(q);
    const double alpha = std::acos(std::clamp(r / std::sqrt(q3), -1.0, 1.0));
    const double pi2 = 2.0 * std::numbers::pi;
    const double t1 = -2.0 * sq * std::cos((alpha - pi2) / 3.0) - c2 / 3.0;
    const double t2 = -2.0 * sq * std::cos((alpha + pi2) / 3.0) - c2 / 3.0;
    if (t1 > 0.0) {
      // t1 local max, t2 local min: compare the objective against zero
      if (t2 / 2.0 + lambda * (a + 1.0) / (a + t2) < z) t = t2;
    } else if (t2 > 0.0) {
      t = t2;
    }
  }
  if (t == 0.0 && c0 < 0.0) {
    // Zero is not even a local minimum (derivative at 0+ is negative); the
    // discriminant test above can only miss this through roundoff when two
    // roots nearly coincide at -a.
    t = sica_bracketed_root(z, lambda, a);
  }
  if (t > 0.0) {
    // Ties resolve to the sparser solution.
    constexpr double kTieTol = 1e-12;
    if (sica_objective(t, z, lambda, a) >= sica_objective(0.0, z, lambda, a) - kTieTol &&
        c0 >= 0.0) {
      return 0.0;
    }
  }
  return sign(theta0) * t;
}

}  // namespace

std::string to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::kL1: return "lasso";
    case PenaltyKind::kSCAD: return "scad";
    case PenaltyKind::kMCP: return "mcp";
    case PenaltyKind::kSICA: return "sica";
    case PenaltyKind::kElasticNet: return "enet";
  }
  return "unknown";
}

PenaltyKind parse_penalty_kind(const std::string& name) {
  if (name == "lasso" || name == "l1") return PenaltyKind::kL1;
  if (name == "scad") return PenaltyKind::kSCAD;
  if (name == "mcp") return PenaltyKind::kMCP;
  if (name == "sica") return PenaltyKind::kSICA;
  if (name == "enet" || name == "elastic_net") return PenaltyKind::kElasticNet;
  throw std::invalid_argument("unknown penalty '" + name + "'");
}

PenaltySpec::PenaltySpec(PenaltyKind kind, double shape_a, double enet_alpha)
    : kind_(kind), shape_a_(shape_a), enet_alpha_(enet_alpha) {
  switch (kind_) {
    case PenaltyKind::kSCAD:
      if (!(shape_a_ > 2.0)) throw std::invalid_argument("SCAD requires a > 2");
      break;
    case PenaltyKind::kMCP:
      if (!(shape_a_ > 1.0)) throw std::invalid_argument("MCP requires a > 1");
      break;
    case PenaltyKind::kSICA:
      if (!(shape_a_ > 0.0) || !std::isfinite(shape_a_)) {
        throw std::invalid_argument("SICA requires a > 0");
      }
      break;
    case PenaltyKind::kElasticNet:
      if (!(enet_alpha_ > 0.0 && enet_alpha_ <= 1.0)) {
        throw std::invalid_argument("elastic net requires alpha in (0, 1]");
      }
      break;
    case PenaltyKind::kL1:
      break;
  }
}

PenaltySpec PenaltySpec::lasso() { return {PenaltyKind::kL1, 0.0, 1.0}; }
PenaltySpec PenaltySpec::scad(double a) { return {PenaltyKind::kSCAD, a, 1.0}; }
PenaltySpec PenaltySpec::mcp(double a) { return {PenaltyKind::kMCP, a, 1.0}; }
PenaltySpec PenaltySpec::sica(double a) { return {PenaltyKind::kSICA, a, 1.0}; }
PenaltySpec PenaltySpec::elastic_net(double alpha) {
  return {PenaltyKind::kElasticNet, 0.0, alpha};
}

std::string PenaltySpec::describe() const {
  std::ostringstream out;
  out << to_string(kind_);
  switch (kind_) {
    case PenaltyKind::kSCAD:
    case PenaltyKind::kMCP:
    case PenaltyKind::kSICA: out << "(a=" << shape_a_ << ")"; break;
    case PenaltyKind::kElasticNet: out << "(alpha=" << enet_alpha_ << ")"; break;
    case PenaltyKind::kL1: break;
  }
  return out.str();
}

double penalty_value(const PenaltySpec& spec, double theta, double lambda) {
  require_nonnegative(theta, lambda);
  const double a = spec.shape_a();
  switch (spec.kind()) {
    case PenaltyKind::kL1:
      return lambda * theta;
    case PenaltyKind::kSCAD:
      if (theta <= lambda) return lambda * theta;
      if (theta <= a * lambda) {
        return (2.0 * a * lambda * theta - theta * theta - lambda * lambda) / (2.0 * (a - 1.0));
      }
      return lambda * lambda * (a + 1.0) / 2.0;
    case PenaltyKind::kMCP:
      if (theta <= a * lambda) return lambda * theta - theta * theta / (2.0 * a);
      return a * lambda * lambda / 2.0;
    case PenaltyKind::kSICA:
      return lambda * (a + 1.0) * theta / (a + theta);
    case PenaltyKind::kElasticNet: {
      const double alpha = spec.enet_alpha();
      return lambda * (alpha * theta + (1.0 - alpha) * theta * theta / 2.0);
    }
  }
  return 0.0;
}

double penalty_derivative(const PenaltySpec& spec, double theta, double lambda) {
  if (!(theta > 0.0)) throw std::invalid_argument("penalty derivative needs theta > 0");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  const double a = spec.shape_a();
  switch (spec.kind()) {
    case PenaltyKind::kL1:
      return lambda;
    case PenaltyKind::kSCAD:
      if (theta <= lambda) return lambda;
      return std::max(a * lambda - theta, 0.0) / (a - 1.0);
    case PenaltyKind::kMCP:
      return std::max(a * lambda - theta, 0.0) / a;
    case PenaltyKind::kSICA:
      return lambda * a * (a + 1.0) / ((a + theta) * (a + theta));
    case PenaltyKind::kElasticNet:
      return lambda * (spec.enet_alpha() + (1.0 - spec.enet_alpha()) * theta);
  }
  return 0.0;
}

double max_concavity(const PenaltySpec& spec, double lambda) {
  const double a = spec.shape_a();
  switch (spec.kind()) {
    case PenaltyKind::kL1:
    case PenaltyKind::kElasticNet: return 0.0;
    case PenaltyKind::kSCAD: return 1.0 / (a - 1.0);
    case PenaltyKind::kMCP: return 1.0 / a;
    case PenaltyKind::kSICA: return 2.0 * lambda * (1.0 / a + 1.0 / (a * a));
  }
  return 0.0;
}

double univariate_minimize(const PenaltySpec& spec, double theta0, double lambda) {
  if (!std::isfinite(theta0)) throw std::invalid_argument("theta0 must be finite");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  if (theta0 == 0.0) return 0.0;
  const double z = std::abs(theta0);
  const double a = spec.shape_a();
  switch (spec.kind()) {
    case PenaltyKind::kL1:
      return soft_threshold(theta0, lambda);
    case PenaltyKind::kSCAD:
      if (z <= 2.0 * lambda) return soft_threshold(theta0, lambda);
      if (z <= a * lambda) return sign(theta0) * std::min(z, ((a - 1.0) * z - a * lambda) / (a - 2.0));
      return theta0;
    case PenaltyKind::kMCP:
      if (z <= lambda) return 0.0;
      if (z <= a * lambda) return sign(theta0) * std::min(z, (z - lambda) / (1.0 - 1.0 / a));
      return theta0;
    case PenaltyKind::kSICA:
      if (lambda == 0.0) return theta0;
      return sica_minimize(theta0, lambda, a);
    case PenaltyKind::kElasticNet: {
      const double alpha = spec.enet_alpha();
      return soft_threshold(theta0, lambda * alpha) / (1.0 + lambda * (1.0 - alpha));
    }
  }
  return 0.0;
}

double zero_threshold(const PenaltySpec& spec, double lambda) {
  switch (spec.kind()) {
    case PenaltyKind::kL1:
    case PenaltyKind::kSCAD:
    case PenaltyKind::kMCP: return lambda;
    case PenaltyKind::kElasticNet: return lambda * spec.enet_alpha();
    case PenaltyKind::kSICA: {
      const double a = spec.shape_a();
      const double s = std::sqrt(2.0 * lambda * (a + 1.0));
      if (s > a) return s - a / 2.0;
      return lambda * (a + 1.0) / a;
    }
  }
  return lambda;
}

}  // namespace addhaz
