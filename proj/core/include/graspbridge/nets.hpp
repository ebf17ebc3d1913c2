#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "graspbridge/bridge.hpp"

namespace graspbridge::nets {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Activation { kSiLU, kIdentity };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view s);

struct Layer {
  MatrixXd W;  // out x in
  VectorXd b;
};

/// Fully connected regressor. The activation is applied after every layer
/// except the last.
struct NetParams {
  std::vector<Layer> layers;
  Activation activation = Activation::kSiLU;

  Eigen::Index input_dim() const { return layers.empty() ? 0 : layers.front().W.cols(); }
  Eigen::Index output_dim() const { return layers.empty() ? 0 : layers.back().W.rows(); }
  std::vector<Eigen::Index> sizes() const;
  Eigen::Index parameter_count() const;
};

/// Time is fed to the network as [t, sin(2 pi t), cos(2 pi t)].
inline constexpr Eigen::Index kTimeFeatures = 3;

/// Weights uniform in +-1/sqrt(fan_in), zero biases. Deterministic per seed.
NetParams net_init(Eigen::Index input_dim, const std::vector<Eigen::Index>& hidden, Eigen::Index output_dim,
                   std::uint64_t seed, Activation activation = Activation::kSiLU);

/// Same shapes as `like`, all zeros.
NetParams zeros_like(const NetParams& like);

/// Layer-by-layer concatenation of W (column-major) then b.
VectorXd flatten(const NetParams& params);
void unflatten(const VectorXd& flat, NetParams& params);

VectorXd time_features(double t);

/// Columns are samples: rows = [x; time features; context].
MatrixXd assemble_inputs(const MatrixXd& xs, std::span<const double> ts, const MatrixXd* context = nullptr);

/// Raw forward over a batch of assembled inputs (input_dim x B).
MatrixXd forward_batch(const NetParams& params, const MatrixXd& inputs);

/// Forward for one state at time t. Throws kShape if the dimensions disagree.
VectorXd net_forward(const NetParams& params, const VectorXd& x, double t, const VectorXd& context = VectorXd());

struct LossGrads {
  double loss = 0.0;        // flow_loss + score_loss
  double flow_loss = 0.0;   // mean ||v - flow_target||^2
  double score_loss = 0.0;  // mean ||lambda s + noise||^2
  NetParams v_grad;
  NetParams s_grad;
};

/// Mean over the batch of ||v(t, x_t) - u||^2 + ||lambda_t s(t, x_t) + noise||^2
/// with exact reverse-mode gradients for both networks. `context`, when
/// given, has one column per sample. Throws kNumeric naming the first sample
/// whose loss is not finite.
LossGrads loss_grads(const NetParams& v, const NetParams& s, std::span<const bridge::BridgeSample> batch,
                     const MatrixXd* context = nullptr);

struct OptimConfig {
  double lr = 2e-4;
  long warmup_steps = 256;
  double clip_norm = 1.0;
  double ema_decay = 0.999;
  long ema_start = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
};

/// Adam moments and the EMA shadow, flattened in `flatten` order.
struct OptimState {
  long step = 0;
  VectorXd m;
  VectorXd v;
  VectorXd ema;
  OptimConfig config;
};

OptimState optim_init(const NetParams& params, const OptimConfig& config);

/// lr * min(1, step / warmup_steps) for the 1-based step about to be applied.
double warmup_lr(const OptimConfig& config, long step);

/// Scales grads in place so their global L2 norm is at most clip_norm.
/// Returns the norm before clipping.
double clip_global_norm(NetParams& grads, double clip_norm);

struct StepInfo {
  double grad_norm = 0.0;  // before clipping
  double lr = 0.0;
};

/// Clip, warm-up, Adam update, then the EMA update (a plain copy while
/// step < ema_start). Throws kNumeric on a non-finite gradient without
/// touching params or state.
StepInfo opt_step(NetParams& params, const NetParams& grads, OptimState& state);

NetParams ema_params(const NetParams& like, const OptimState& state);

}  // namespace graspbridge::nets
