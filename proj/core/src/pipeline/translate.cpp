#include "graspbridge/pipeline/translate.hpp"

#include "graspbridge/error.hpp"
#include "graspbridge/parallel.hpp"
#include "graspbridge/pipeline/train.hpp"

namespace graspbridge::pipeline {

TranslateMethod parse_translate_method(std::string_view s) {
  if (s == "em") return TranslateMethod::kEulerMaruyama;
  if (s == "euler") return TranslateMethod::kOdeEuler;
  if (s == "rk4") return TranslateMethod::kOdeRK4;
  throw Error(ErrorCode::kInvalidInput, "unknown translation method '" + std::string(s) + "'");
}

std::vector<geometry::GraspConfig> translate(const Checkpoint& ckpt, const std::vector<geometry::GraspConfig>& source,
                                             const TranslateOptions& options) {
  if (options.score_scale && *options.score_scale != ckpt.score_scale) {
    throw Error(ErrorCode::kConfig, "score scale '" + std::string(sampler::to_string(*options.score_scale)) +
                                        "' does not match the checkpoint's '" +
                                        std::string(sampler::to_string(ckpt.score_scale)) + "'");
  }
  if (ckpt.flow_net.output_dim() != ckpt.codec.dim || ckpt.score_net.output_dim() != ckpt.codec.dim) {
    throw Error(ErrorCode::kConfig, "checkpoint networks do not match its latent width");
  }
  const int src_dof = ckpt.source_hand.dof();
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (source[i].joints.size() != src_dof) {
      throw Error(ErrorCode::kConfig, "config " + std::to_string(i) + " has " +
                                          std::to_string(source[i].joints.size()) + " joints; the checkpoint expects " +
                                          std::to_string(src_dof));
    }
  }
  if (options.samples_per_input < 1) throw Error(ErrorCode::kInvalidInput, "samples_per_input must be >= 1");
  if (source.empty()) return {};

  const nets::NetParams v = options.use_ema ? nets::ema_params(ckpt.flow_net, ckpt.flow_opt) : ckpt.flow_net;
  const nets::NetParams s = options.use_ema ? nets::ema_params(ckpt.score_net, ckpt.score_opt) : ckpt.score_net;
  const Eigen::VectorXd context = Eigen::VectorXd::Zero(ckpt.config.context_dim);
  const double sigma = ckpt.config.sigma;
  const double t_min = ckpt.config.t_min;

  const Eigen::MatrixXd encoded = encode_all(ckpt.codec, source);
  const int reps = options.samples_per_input;
  Eigen::MatrixXd z0(encoded.rows(), encoded.cols() * reps);
  for (Eigen::Index i = 0; i < encoded.cols(); ++i) {
    for (int k = 0; k < reps; ++k) z0.col(i * reps + k) = encoded.col(i);
  }
  Eigen::MatrixXd z1(z0.rows(), z0.cols());
  if (options.method == TranslateMethod::kEulerMaruyama) {
    z1 = sampler::em_endpoints(sampler::net_batch_field(v, context), sampler::net_batch_field(s, context), z0, sigma,
                               options.n_steps, options.seed, t_min, sampler::score_weight(ckpt.score_scale, sigma));
  } else {
    const auto method = options.method == TranslateMethod::kOdeEuler ? sampler::OdeMethod::kEuler : sampler::OdeMethod::kRK4;
    const auto field = sampler::net_field(v, context);
    parallel_for(static_cast<std::size_t>(z0.cols()), [&](std::size_t j) {
      const auto col = static_cast<Eigen::Index>(j);
      z1.col(col) = sampler::ode_integrate(field, z0.col(col), options.n_steps, method, t_min).endpoint();
    });
  }

  std::vector<geometry::GraspConfig> out;
  out.reserve(source.size());
  for (Eigen::Index j = 0; j < z1.cols(); ++j) {
    geometry::GraspConfig g = ckpt.codec.decode(z1.col(j), ckpt.target_hand.dof(), ckpt.target_hand.hand_id);
    g.base.rot6 = geometry::rot6d_encode(geometry::rot6d_decode(g.base.rot6));
    out.push_back(std::move(g));
  }
  return out;
}

Dataset translate_dataset(const Checkpoint& ckpt, const Dataset& source, const TranslateOptions& options) {
  const auto configs = translate(ckpt, source.configs(), options);
  Dataset out;
  out.hand = ckpt.target_hand;
  out.object = source.object;
  out.seed = options.seed;
  out.origin = "translated";
  out.metadata = {{"checkpoint_fingerprint", ckpt.fingerprint},
                  {"method", options.method == TranslateMethod::kEulerMaruyama ? "em"
                             : options.method == TranslateMethod::kOdeEuler   ? "euler"
                                                                              : "rk4"},
                  {"n_steps", std::to_string(options.n_steps)},
                  {"samples_per_input", std::to_string(options.samples_per_input)},
                  {"score_scale", std::string(sampler::to_string(ckpt.score_scale))},
                  {"time_interval", "[" + std::to_string(ckpt.config.t_min) + ", " +
                                        std::to_string(1.0 - ckpt.config.t_min) + "]"},
                  {"weights", options.use_ema ? "ema" : "raw"}};
  out.grasps.resize(configs.size());
  parallel_for(configs.size(), [&](std::size_t i) { out.grasps[i] = annotate(out.hand, out.object, configs[i]); });
  return out;
}

}  // namespace graspbridge::pipeline
