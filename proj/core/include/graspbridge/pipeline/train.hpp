#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "graspbridge/nets.hpp"
#include "graspbridge/pipeline/checkpoint.hpp"
#include "graspbridge/pipeline/dataset.hpp"
#include "graspbridge/pipeline/run_config.hpp"

namespace graspbridge::pipeline {

struct TrainLogEntry {
  long step = 0;  // 1-based optimizer step
  double loss = 0.0;
  double flow_loss = 0.0;
  double score_loss = 0.0;
  double flow_grad_norm = 0.0;
  double score_grad_norm = 0.0;
  double lr = 0.0;
  double eps = 0.0;
  int sinkhorn_iterations = 0;
  double marginal_error = 0.0;
};

using TrainLog = std::function<void(const TrainLogEntry&)>;

/// Ground cost between the selected source and target samples (rows follow
/// `source_idx`, columns follow `target_idx`).
using BatchCost = std::function<Eigen::MatrixXd(const std::vector<Eigen::Index>& source_idx,
                                                const std::vector<Eigen::Index>& target_idx, long step)>;

struct BridgeModel {
  nets::NetParams flow_net;
  nets::NetParams score_net;
  nets::OptimState flow_opt;
  nets::OptimState score_opt;
};

/// Both regressors at their seeded initialization for states of width `dim`.
BridgeModel init_model(Eigen::Index dim, const RunConfig& cfg);

/// Minibatch-OT bridge training on latent samples stored as columns. Every
/// step draws min(batch_size, n) columns from each side without replacement,
/// couples them with Sinkhorn on `cost`, resamples pairs from the plan and
/// takes one Adam step on both networks. Errors are rethrown with the step.
BridgeModel train_bridge(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target, const RunConfig& cfg,
                         const BatchCost& cost, const TrainLog& log = {});

/// Squared Euclidean cost between latent columns.
BatchCost latent_cost(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target);

/// Physical ground cost of cfg.cost between dataset annotations.
BatchCost annotation_cost(const Dataset& source, const Dataset& target, const RunConfig& cfg);

/// Latent matrix (one column per grasp) under `codec`.
Eigen::MatrixXd encode_all(const LatentCodec& codec, const std::vector<geometry::GraspConfig>& configs);

/// Grasp-level training: identity codec over both hands, cfg.cost ground cost.
Checkpoint train(const Dataset& source, const Dataset& target, const RunConfig& cfg, const TrainLog& log = {});

}  // namespace graspbridge::pipeline
