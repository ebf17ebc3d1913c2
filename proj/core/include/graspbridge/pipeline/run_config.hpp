#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "graspbridge/bridge.hpp"
#include "graspbridge/costs.hpp"
#include "graspbridge/nets.hpp"

namespace graspbridge::pipeline {

struct RunConfig {
  costs::CostKind cost = costs::CostKind::kPose;
  double eps = 0.0;  // absolute entropic regularization; <= 0 selects eps_scale * median cost
  double eps_scale = 0.1;
  double sinkhorn_tol = 1e-6;
  int sinkhorn_iters = 10000;

  double sigma = 0.1;
  bridge::LambdaVariant lambda_variant = bridge::LambdaVariant::kRescaled;
  bridge::FlowConvention flow_convention = bridge::FlowConvention::kDerived;
  double t_min = bridge::kDefaultTMin;

  std::vector<Eigen::Index> hidden{64, 64};
  nets::Activation activation = nets::Activation::kSiLU;
  Eigen::Index context_dim = 0;

  double lr = 2e-4;
  long warmup_steps = 256;
  double clip_norm = 1.0;
  double ema_decay = 0.999;
  long ema_start = -1;  // < 0: half of `steps`

  long steps = 3000;
  int batch_size = 128;
  std::uint64_t seed = 0;
  std::size_t iou_samples = 100000;

  std::string source_path;
  std::string target_path;
  std::string out_path;

  /// Throws kConfig for out-of-range settings.
  void validate() const;
  long resolved_ema_start() const { return ema_start < 0 ? steps / 2 : ema_start; }
  nets::OptimConfig optim_config() const;
};

/// JSON mirror of RunConfig. Unknown keys are rejected.
std::string run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& text, const RunConfig& defaults = {});
RunConfig load_run_config(const std::filesystem::path& path, const RunConfig& defaults = {});

/// FNV-1a of the canonical JSON of the training-relevant fields (paths excluded).
std::string config_fingerprint(const RunConfig& cfg);

}  // namespace graspbridge::pipeline
