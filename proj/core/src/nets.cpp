#include "graspbridge/nets.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "graspbridge/error.hpp"
#include "graspbridge/random.hpp"

namespace graspbridge::nets {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void activate(Activation a, const MatrixXd& z, MatrixXd& h) {
  if (a == Activation::kIdentity) {
    h = z;
    return;
  }
  h = z.unaryExpr([](double v) { return v * sigmoid(v); });
}

// d act / dz evaluated at z.
MatrixXd activation_slope(Activation a, const MatrixXd& z) {
  if (a == Activation::kIdentity) return MatrixXd::Ones(z.rows(), z.cols());
  return z.unaryExpr([](double v) {
    double s = sigmoid(v);
    return s * (1.0 + v * (1.0 - s));
  });
}

struct Tape {
  std::vector<MatrixXd> pre;   // z_l
  std::vector<MatrixXd> post;  // h_l, post[0] is the input
};

MatrixXd forward_recorded(const NetParams& p, const MatrixXd& inputs, Tape& tape) {
  tape.pre.clear();
  tape.post.clear();
  tape.post.push_back(inputs);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const Layer& layer = p.layers[l];
    MatrixXd z = layer.W * tape.post.back();
    z.colwise() += layer.b;
    if (l + 1 == p.layers.size()) {
      tape.pre.push_back(z);
      return z;
    }
    MatrixXd h;
    activate(p.activation, z, h);
    tape.pre.push_back(std::move(z));
    tape.post.push_back(std::move(h));
  }
  return inputs;
}

void backward(const NetParams& p, const Tape& tape, MatrixXd d_out, NetParams& grad) {
  grad = zeros_like(p);
  MatrixXd dz = std::move(d_out);
  for (std::size_t l = p.layers.size(); l-- > 0;) {
    grad.layers[l].W = dz * tape.post[l].transpose();
    grad.layers[l].b = dz.rowwise().sum();
    if (l == 0) break;
    MatrixXd dh = p.layers[l].W.transpose() * dz;
    dz = dh.cwiseProduct(activation_slope(p.activation, tape.pre[l - 1]));
  }
}

void check_input(const NetParams& p, Eigen::Index rows) {
  if (p.layers.empty()) throw Error(ErrorCode::kShape, "network has no layers");
  if (rows != p.input_dim()) {
    throw Error(ErrorCode::kShape, "network expects input dimension " + std::to_string(p.input_dim()) +
                                       ", got " + std::to_string(rows));
  }
}

}  // namespace

std::string_view to_string(Activation a) { return a == Activation::kSiLU ? "silu" : "identity"; }

Activation parse_activation(std::string_view s) {
  if (s == "silu") return Activation::kSiLU;
  if (s == "identity") return Activation::kIdentity;
  throw Error(ErrorCode::kInvalidInput, "unknown activation '" + std::string(s) + "'");
}

std::vector<Eigen::Index> NetParams::sizes() const {
  std::vector<Eigen::Index> out;
  if (layers.empty()) return out;
  out.push_back(layers.front().W.cols());
  for (const auto& l : layers) out.push_back(l.W.rows());
  return out;
}

Eigen::Index NetParams::parameter_count() const {
  Eigen::Index n = 0;
  for (const auto& l : layers) n += l.W.size() + l.b.size();
  return n;
}

NetParams net_init(Eigen::Index input_dim, const std::vector<Eigen::Index>& hidden, Eigen::Index output_dim,
                   std::uint64_t seed, Activation activation) {
  if (input_dim < 1 || output_dim < 1) throw Error(ErrorCode::kShape, "network dimensions must be >= 1");
  std::vector<Eigen::Index> sizes{input_dim};
  for (auto h : hidden) {
    if (h < 1) throw Error(ErrorCode::kShape, "hidden layer width must be >= 1");
    sizes.push_back(h);
  }
  sizes.push_back(output_dim);

  Rng rng = make_rng(seed);
  NetParams p;
  p.activation = activation;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes[l]));
    std::uniform_real_distribution<double> u(-bound, bound);
    Layer layer;
    layer.W.resize(sizes[l + 1], sizes[l]);
    for (Eigen::Index k = 0; k < layer.W.size(); ++k) layer.W.data()[k] = u(rng);
    layer.b = VectorXd::Zero(sizes[l + 1]);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

NetParams zeros_like(const NetParams& like) {
  NetParams z;
  z.activation = like.activation;
  for (const auto& l : like.layers) {
    z.layers.push_back({MatrixXd::Zero(l.W.rows(), l.W.cols()), VectorXd::Zero(l.b.size())});
  }
  return z;
}

VectorXd flatten(const NetParams& params) {
  VectorXd out(params.parameter_count());
  Eigen::Index at = 0;
  for (const auto& l : params.layers) {
    out.segment(at, l.W.size()) = Eigen::Map<const VectorXd>(l.W.data(), l.W.size());
    at += l.W.size();
    out.segment(at, l.b.size()) = l.b;
    at += l.b.size();
  }
  return out;
}

void unflatten(const VectorXd& flat, NetParams& params) {
  if (flat.size() != params.parameter_count()) {
    throw Error(ErrorCode::kShape, "flat parameter vector has the wrong length");
  }
  Eigen::Index at = 0;
  for (auto& l : params.layers) {
    Eigen::Map<VectorXd>(l.W.data(), l.W.size()) = flat.segment(at, l.W.size());
    at += l.W.size();
    l.b = flat.segment(at, l.b.size());
    at += l.b.size();
  }
}

VectorXd time_features(double t) {
  VectorXd f(kTimeFeatures);
  const double angle = 2.0 * std::numbers::pi * t;
  f << t, std::sin(angle), std::cos(angle);
  return f;
}

MatrixXd assemble_inputs(const MatrixXd& xs, std::span<const double> ts, const MatrixXd* context) {
  const Eigen::Index batch = xs.cols();
  if (static_cast<Eigen::Index>(ts.size()) != batch) throw Error(ErrorCode::kShape, "one time per sample required");
  const Eigen::Index ctx = context != nullptr ? context->rows() : 0;
  if (context != nullptr && context->cols() != batch) {
    throw Error(ErrorCode::kShape, "context needs one column per sample");
  }
  MatrixXd in(xs.rows() + kTimeFeatures + ctx, batch);
  in.topRows(xs.rows()) = xs;
  for (Eigen::Index b = 0; b < batch; ++b) {
    in.block(xs.rows(), b, kTimeFeatures, 1) = time_features(ts[static_cast<std::size_t>(b)]);
  }
  if (ctx > 0) in.bottomRows(ctx) = *context;
  return in;
}

MatrixXd forward_batch(const NetParams& params, const MatrixXd& inputs) {
  check_input(params, inputs.rows());
  MatrixXd h = inputs;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    MatrixXd z = params.layers[l].W * h;
    z.colwise() += params.layers[l].b;
    if (l + 1 == params.layers.size()) return z;
    activate(params.activation, z, h);
  }
  return h;
}

VectorXd net_forward(const NetParams& params, const VectorXd& x, double t, const VectorXd& context) {
  VectorXd in(x.size() + kTimeFeatures + context.size());
  in << x, time_features(t), context;
  check_input(params, in.size());
  return forward_batch(params, in);
}

LossGrads loss_grads(const NetParams& v, const NetParams& s, std::span<const bridge::BridgeSample> batch,
                     const MatrixXd* context) {
  if (batch.empty()) throw Error(ErrorCode::kEmptyInput, "loss over an empty batch");
  const Eigen::Index dim = batch.front().x_t.size();
  const auto n = static_cast<Eigen::Index>(batch.size());
  MatrixXd xs(dim, n), flow(dim, n), noise(dim, n);
  std::vector<double> ts(batch.size());
  VectorXd lambda(n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const auto& row = batch[static_cast<std::size_t>(b)];
    if (row.x_t.size() != dim || row.flow_target.size() != dim || row.noise.size() != dim) {
      throw Error(ErrorCode::kShape, "batch rows have inconsistent dimensions");
    }
    xs.col(b) = row.x_t;
    flow.col(b) = row.flow_target;
    noise.col(b) = row.noise;
    ts[static_cast<std::size_t>(b)] = row.t;
    lambda(b) = row.lambda_t;
  }
  const MatrixXd inputs = assemble_inputs(xs, ts, context);
  check_input(v, inputs.rows());
  check_input(s, inputs.rows());
  if (v.output_dim() != dim || s.output_dim() != dim) {
    throw Error(ErrorCode::kShape, "network output dimension does not match the state");
  }

  Tape tv, ts_tape;
  const MatrixXd v_out = forward_recorded(v, inputs, tv);
  const MatrixXd s_out = forward_recorded(s, inputs, ts_tape);

  const MatrixXd flow_res = v_out - flow;
  const MatrixXd score_res = (s_out.array().rowwise() * lambda.transpose().array()).matrix() + noise;

  LossGrads out;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index b = 0; b < n; ++b) {
    double fl = flow_res.col(b).squaredNorm();
    double sl = score_res.col(b).squaredNorm();
    if (!std::isfinite(fl) || !std::isfinite(sl)) {
      throw Error(ErrorCode::kNumeric, "non-finite loss at batch sample " + std::to_string(b));
    }
    out.flow_loss += fl;
    out.score_loss += sl;
  }
  out.flow_loss *= inv_n;
  out.score_loss *= inv_n;
  out.loss = out.flow_loss + out.score_loss;

  backward(v, tv, (2.0 * inv_n) * flow_res, out.v_grad);
  MatrixXd d_s = (score_res.array().rowwise() * lambda.transpose().array()).matrix() * (2.0 * inv_n);
  backward(s, ts_tape, std::move(d_s), out.s_grad);
  return out;
}

OptimState optim_init(const NetParams& params, const OptimConfig& config) {
  OptimState st;
  st.config = config;
  const Eigen::Index n = params.parameter_count();
  st.m = VectorXd::Zero(n);
  st.v = VectorXd::Zero(n);
  st.ema = flatten(params);
  return st;
}

double warmup_lr(const OptimConfig& config, long step) {
  if (config.warmup_steps <= 0) return config.lr;
  double frac = static_cast<double>(step) / static_cast<double>(config.warmup_steps);
  return config.lr * std::min(1.0, frac);
}

double clip_global_norm(NetParams& grads, double clip_norm) {
  double sq = 0.0;
  for (const auto& l : grads.layers) sq += l.W.squaredNorm() + l.b.squaredNorm();
  const double norm = std::sqrt(sq);
  if (clip_norm > 0.0 && norm > clip_norm) {
    const double scale = clip_norm / norm;
    for (auto& l : grads.layers) {
      l.W *= scale;
      l.b *= scale;
    }
  }
  return norm;
}

StepInfo opt_step(NetParams& params, const NetParams& grads, OptimState& state) {
  const Eigen::Index n = params.parameter_count();
  if (grads.parameter_count() != n || state.m.size() != n || state.v.size() != n || state.ema.size() != n) {
    throw Error(ErrorCode::kShape, "optimizer buffers do not match the parameters");
  }
  NetParams clipped = grads;
  StepInfo info;
  info.grad_norm = clip_global_norm(clipped, state.config.clip_norm);
  if (!std::isfinite(info.grad_norm)) throw Error(ErrorCode::kNumeric, "non-finite gradient");

  const OptimConfig& c = state.config;
  const long step = state.step + 1;
  info.lr = warmup_lr(c, step);

  const VectorXd g = flatten(clipped);
  VectorXd theta = flatten(params);
  state.m = c.beta1 * state.m + (1.0 - c.beta1) * g;
  state.v = c.beta2 * state.v + (1.0 - c.beta2) * g.cwiseAbs2();
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(step));
  theta.array() -= info.lr * (state.m.array() / bc1) / ((state.v.array() / bc2).sqrt() + c.adam_eps);
  unflatten(theta, params);
  state.step = step;

  if (step < c.ema_start) {
    state.ema = theta;
  } else {
    state.ema = c.ema_decay * state.ema + (1.0 - c.ema_decay) * theta;
  }
  return info;
}

NetParams ema_params(const NetParams& like, const OptimState& state) {
  NetParams out = like;
  unflatten(state.ema, out);
  return out;
}

}  // namespace graspbridge::nets
