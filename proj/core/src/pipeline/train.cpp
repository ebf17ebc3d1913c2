#include "graspbridge/pipeline/train.hpp"

#include <numeric>

#include "graspbridge/bridge.hpp"
#include "graspbridge/costs.hpp"
#include "graspbridge/error.hpp"
#include "graspbridge/ot.hpp"
#include "graspbridge/random.hpp"
#include "graspbridge/sampler.hpp"

namespace graspbridge::pipeline {
namespace {

// Stream indices for make_rng / mix_seed; fixed so runs are reproducible.
constexpr std::uint64_t kFlowInitStream = 101;
constexpr std::uint64_t kScoreInitStream = 102;
constexpr std::uint64_t kBatchStream = 103;
constexpr std::uint64_t kPairStream = 104;
constexpr std::uint64_t kCostStream = 105;

std::vector<Eigen::Index> draw_without_replacement(Eigen::Index n, Eigen::Index k, Rng& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

std::vector<costs::GraspAnnotation> select(const std::vector<costs::GraspAnnotation>& all,
                                           const std::vector<Eigen::Index>& idx) {
  std::vector<costs::GraspAnnotation> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(all[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace

BridgeModel init_model(Eigen::Index dim, const RunConfig& cfg) {
  const Eigen::Index in = dim + nets::kTimeFeatures + cfg.context_dim;
  BridgeModel m;
  m.flow_net = nets::net_init(in, cfg.hidden, dim, mix_seed(cfg.seed, kFlowInitStream), cfg.activation);
  m.score_net = nets::net_init(in, cfg.hidden, dim, mix_seed(cfg.seed, kScoreInitStream), cfg.activation);
  const nets::OptimConfig oc = cfg.optim_config();
  m.flow_opt = nets::optim_init(m.flow_net, oc);
  m.score_opt = nets::optim_init(m.score_net, oc);
  return m;
}

BridgeModel train_bridge(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target, const RunConfig& cfg,
                         const BatchCost& cost, const TrainLog& log) {
  cfg.validate();
  if (source.cols() == 0 || target.cols() == 0) throw Error(ErrorCode::kEmptyInput, "training sets must be nonempty");
  if (source.rows() != target.rows()) {
    throw Error(ErrorCode::kConfig, "source width " + std::to_string(source.rows()) + " differs from target width " +
                                        std::to_string(target.rows()));
  }
  const Eigen::Index dim = source.rows();
  BridgeModel m = init_model(dim, cfg);

  Rng batch_rng = make_rng(cfg.seed, kBatchStream);
  const Eigen::Index bs = std::min<Eigen::Index>(cfg.batch_size, source.cols());
  const Eigen::Index bt = std::min<Eigen::Index>(cfg.batch_size, target.cols());
  const std::size_t n_pairs = static_cast<std::size_t>(std::max(bs, bt));
  const bridge::TargetOptions targets{cfg.t_min, cfg.flow_convention, cfg.lambda_variant};
  const Eigen::MatrixXd context = Eigen::MatrixXd::Zero(cfg.context_dim, static_cast<Eigen::Index>(n_pairs));
  const ot::SinkhornOptions sk{cfg.sinkhorn_tol, cfg.sinkhorn_iters};

  for (long step = 1; step <= cfg.steps; ++step) {
    try {
      const auto si = draw_without_replacement(source.cols(), bs, batch_rng);
      const auto ti = draw_without_replacement(target.cols(), bt, batch_rng);
      const Eigen::MatrixXd C = cost(si, ti, step);
      const double eps = cfg.eps > 0.0 ? cfg.eps : ot::default_eps(C, cfg.eps_scale);
      const ot::TransportPlan plan = ot::sinkhorn(C, ot::uniform_marginal(bs), ot::uniform_marginal(bt), eps, sk);
      const auto pairs = ot::sample_pairs(plan, n_pairs, mix_seed(mix_seed(cfg.seed, kPairStream), step));

      std::vector<bridge::BridgeSample> batch;
      batch.reserve(n_pairs);
      for (const auto& [i, j] : pairs) {
        const double t = bridge::sample_time(batch_rng, cfg.t_min);
        batch.push_back(bridge::training_targets(t, source.col(si[static_cast<std::size_t>(i)]),
                                                 target.col(ti[static_cast<std::size_t>(j)]), cfg.sigma, batch_rng,
                                                 targets));
      }
      const nets::LossGrads lg =
          nets::loss_grads(m.flow_net, m.score_net, batch, cfg.context_dim > 0 ? &context : nullptr);
      const nets::StepInfo fi = nets::opt_step(m.flow_net, lg.v_grad, m.flow_opt);
      const nets::StepInfo si_ = nets::opt_step(m.score_net, lg.s_grad, m.score_opt);
      if (log) {
        log(TrainLogEntry{step, lg.loss, lg.flow_loss, lg.score_loss, fi.grad_norm, si_.grad_norm, fi.lr, eps,
                          plan.iterations_used, plan.marginal_error});
      }
    } catch (const Error& e) {
      throw Error::wrap(e, "training step " + std::to_string(step));
    }
  }
  return m;
}

BatchCost latent_cost(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target) {
  return [&source, &target](const std::vector<Eigen::Index>& si, const std::vector<Eigen::Index>& ti, long) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(si.size()), source.rows());
    Eigen::MatrixXd b(static_cast<Eigen::Index>(ti.size()), target.rows());
    for (std::size_t k = 0; k < si.size(); ++k) a.row(static_cast<Eigen::Index>(k)) = source.col(si[k]).transpose();
    for (std::size_t k = 0; k < ti.size(); ++k) b.row(static_cast<Eigen::Index>(k)) = target.col(ti[k]).transpose();
    return costs::sq_euclidean_cost(a, b);
  };
}

BatchCost annotation_cost(const Dataset& source, const Dataset& target, const RunConfig& cfg) {
  costs::CostParams base;
  base.kind = cfg.cost;
  base.iou_samples = cfg.iou_samples;
  const std::uint64_t seed = mix_seed(cfg.seed, kCostStream);
  return [&source, &target, base, seed](const std::vector<Eigen::Index>& si, const std::vector<Eigen::Index>& ti,
                                        long step) {
    costs::CostParams p = base;
    p.seed = mix_seed(seed, static_cast<std::uint64_t>(step));
    return costs::cost_matrix(select(source.grasps, si), select(target.grasps, ti), p);
  };
}

Eigen::MatrixXd encode_all(const LatentCodec& codec, const std::vector<geometry::GraspConfig>& configs) {
  Eigen::MatrixXd Z(codec.dim, static_cast<Eigen::Index>(configs.size()));
  for (std::size_t i = 0; i < configs.size(); ++i) Z.col(static_cast<Eigen::Index>(i)) = codec.encode(configs[i]);
  return Z;
}

Checkpoint train(const Dataset& source, const Dataset& target, const RunConfig& cfg, const TrainLog& log) {
  if (source.grasps.empty() || target.grasps.empty()) {
    throw Error(ErrorCode::kEmptyInput, "training datasets must be nonempty");
  }
  Checkpoint c;
  c.config = cfg;
  c.source_hand = source.hand;
  c.target_hand = target.hand;
  c.codec = LatentCodec::for_hands(source.hand.dof(), target.hand.dof());
  c.score_scale = sampler::score_scale_for(cfg.lambda_variant);
  c.fingerprint = config_fingerprint(cfg);

  const Eigen::MatrixXd zs = encode_all(c.codec, source.configs());
  const Eigen::MatrixXd zt = encode_all(c.codec, target.configs());
  BridgeModel m = train_bridge(zs, zt, cfg, annotation_cost(source, target, cfg), log);
  c.flow_net = std::move(m.flow_net);
  c.score_net = std::move(m.score_net);
  c.flow_opt = std::move(m.flow_opt);
  c.score_opt = std::move(m.score_opt);
  return c;
}

}  // namespace graspbridge::pipeline
