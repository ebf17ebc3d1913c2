#pragma once

#include <string_view>

#include <Eigen/Core>

#include "graspbridge/random.hpp"

namespace graspbridge::bridge {

using Eigen::VectorXd;

/// Prefactor of (x - mu_t) in the conditional flow field.
/// kDerived: (1-2t) / (2t(1-t)), the generator of the Gaussian bridge path.
/// kLiteral: (1-2t) / (1-t), the prefactor as commonly printed; it does not
/// preserve the bridge marginals and is kept for reproduction only.
enum class FlowConvention { kDerived, kLiteral };

/// kUnitVariance: lambda = sigma_t.  kRescaled: lambda = 2 sigma_t / sigma^2.
enum class LambdaVariant { kUnitVariance, kRescaled };

std::string_view to_string(FlowConvention c);
std::string_view to_string(LambdaVariant v);
FlowConvention parse_flow_convention(std::string_view s);
LambdaVariant parse_lambda_variant(std::string_view s);

inline constexpr double kDefaultTMin = 1e-3;

struct BridgeMoments {
  VectorXd mu;
  double sigma_t = 0.0;
};

/// One regression row: x_t = mu_t + sigma_t * noise, with the flow target and
/// the score-loss target (-noise) so the score residual is lambda_t * s + noise.
struct BridgeSample {
  double t = 0.5;
  VectorXd x_t;
  VectorXd noise;
  VectorXd flow_target;
  VectorXd score_loss_target;
  double lambda_t = 0.0;
};

/// mu_t = (1-t) x0 + t x1, sigma_t = sigma sqrt(t(1-t)).
BridgeMoments bridge_params(double t, const VectorXd& x0, const VectorXd& x1, double sigma);

VectorXd cond_flow_target(double t, const VectorXd& x, const VectorXd& x0, const VectorXd& x1,
                          FlowConvention convention = FlowConvention::kDerived);

/// (mu_t - x) / (sigma^2 t (1-t)), the gradient of log N(x; mu_t, sigma_t^2 I).
VectorXd cond_score_target(double t, const VectorXd& x, const VectorXd& x0, const VectorXd& x1,
                           double sigma);

double lambda_schedule(double t, double sigma, LambdaVariant variant);

/// Draws noise ~ N(0, I) and fills every target. Throws kEndpoint unless 0 < t < 1.
BridgeSample sample_bridge(double t, const VectorXd& x0, const VectorXd& x1, double sigma, Rng& rng,
                           FlowConvention convention = FlowConvention::kDerived,
                           LambdaVariant variant = LambdaVariant::kRescaled);

/// Uniform on [t_min, 1 - t_min].
double sample_time(Rng& rng, double t_min = kDefaultTMin);

struct TargetOptions {
  double t_min = kDefaultTMin;
  FlowConvention convention = FlowConvention::kDerived;
  LambdaVariant variant = LambdaVariant::kRescaled;
};

/// sample_bridge restricted to the training support [t_min, 1 - t_min].
BridgeSample training_targets(double t, const VectorXd& x0, const VectorXd& x1, double sigma, Rng& rng,
                              const TargetOptions& options = {});

}  // namespace graspbridge::bridge
