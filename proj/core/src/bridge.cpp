#include "graspbridge/bridge.hpp"

#include <cmath>
#include <string>

#include "graspbridge/error.hpp"

namespace graspbridge::bridge {
namespace {

void check_pair(const VectorXd& x0, const VectorXd& x1) {
  if (x0.size() != x1.size()) throw Error(ErrorCode::kShape, "bridge endpoints have different dimensions");
}

}  // namespace

std::string_view to_string(FlowConvention c) {
  return c == FlowConvention::kDerived ? "derived" : "literal";
}

std::string_view to_string(LambdaVariant v) {
  return v == LambdaVariant::kRescaled ? "rescaled" : "unit-variance";
}

FlowConvention parse_flow_convention(std::string_view s) {
  if (s == "derived") return FlowConvention::kDerived;
  if (s == "literal") return FlowConvention::kLiteral;
  throw Error(ErrorCode::kInvalidInput, "unknown flow convention '" + std::string(s) + "'");
}

LambdaVariant parse_lambda_variant(std::string_view s) {
  if (s == "rescaled") return LambdaVariant::kRescaled;
  if (s == "unit-variance" || s == "unitvar") return LambdaVariant::kUnitVariance;
  throw Error(ErrorCode::kInvalidInput, "unknown lambda variant '" + std::string(s) + "'");
}

BridgeMoments bridge_params(double t, const VectorXd& x0, const VectorXd& x1, double sigma) {
  check_pair(x0, x1);
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::kInvalidInput, "bridge time outside [0, 1]");
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidInput, "sigma must be positive");
  return {(1.0 - t) * x0 + t * x1, sigma * std::sqrt(t * (1.0 - t))};
}

VectorXd cond_flow_target(double t, const VectorXd& x, const VectorXd& x0, const VectorXd& x1,
                          FlowConvention convention) {
  check_pair(x0, x1);
  if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::kEndpoint, "flow target needs 0 < t < 1");
  const VectorXd mu = (1.0 - t) * x0 + t * x1;
  const double prefactor = convention == FlowConvention::kDerived ? (1.0 - 2.0 * t) / (2.0 * t * (1.0 - t))
                                                                  : (1.0 - 2.0 * t) / (1.0 - t);
  return (x1 - x0) + prefactor * (x - mu);
}

VectorXd cond_score_target(double t, const VectorXd& x, const VectorXd& x0, const VectorXd& x1,
                           double sigma) {
  check_pair(x0, x1);
  if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::kEndpoint, "score target needs 0 < t < 1");
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidInput, "sigma must be positive");
  const VectorXd mu = (1.0 - t) * x0 + t * x1;
  return (mu - x) / (sigma * sigma * t * (1.0 - t));
}

double lambda_schedule(double t, double sigma, LambdaVariant variant) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::kInvalidInput, "lambda time outside [0, 1]");
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidInput, "sigma must be positive");
  const double root = std::sqrt(t * (1.0 - t));
  return variant == LambdaVariant::kUnitVariance ? sigma * root : 2.0 * root / sigma;
}

BridgeSample sample_bridge(double t, const VectorXd& x0, const VectorXd& x1, double sigma, Rng& rng,
                           FlowConvention convention, LambdaVariant variant) {
  if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::kEndpoint, "bridge samples need 0 < t < 1");
  const BridgeMoments m = bridge_params(t, x0, x1, sigma);
  std::normal_distribution<double> normal(0.0, 1.0);
  BridgeSample out;
  out.t = t;
  out.noise.resize(x0.size());
  for (Eigen::Index i = 0; i < out.noise.size(); ++i) out.noise(i) = normal(rng);
  out.x_t = m.mu + m.sigma_t * out.noise;
  out.flow_target = cond_flow_target(t, out.x_t, x0, x1, convention);
  out.score_loss_target = -out.noise;
  out.lambda_t = lambda_schedule(t, sigma, variant);
  return out;
}

double sample_time(Rng& rng, double t_min) {
  std::uniform_real_distribution<double> u(t_min, 1.0 - t_min);
  return u(rng);
}

BridgeSample training_targets(double t, const VectorXd& x0, const VectorXd& x1, double sigma, Rng& rng,
                              const TargetOptions& options) {
  if (!(t >= options.t_min && t <= 1.0 - options.t_min)) {
    throw Error(ErrorCode::kEndpoint, "training time " + std::to_string(t) + " outside [t_min, 1 - t_min]");
  }
  return sample_bridge(t, x0, x1, sigma, rng, options.convention, options.variant);
}

}  // namespace graspbridge::bridge
