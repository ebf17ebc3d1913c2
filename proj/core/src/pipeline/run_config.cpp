#include "graspbridge/pipeline/run_config.hpp"

#include <cstdio>
#include <set>

#include "graspbridge/error.hpp"
#include "json_util.hpp"

namespace graspbridge::pipeline {
namespace {

using detail::json;

json training_fields(const RunConfig& c) {
  return json{{"cost", std::string(costs::to_string(c.cost))},
              {"eps", c.eps},
              {"eps_scale", c.eps_scale},
              {"sinkhorn_tol", c.sinkhorn_tol},
              {"sinkhorn_iters", c.sinkhorn_iters},
              {"sigma", c.sigma},
              {"lambda_variant", std::string(bridge::to_string(c.lambda_variant))},
              {"flow_convention", std::string(bridge::to_string(c.flow_convention))},
              {"t_min", c.t_min},
              {"hidden", c.hidden},
              {"activation", std::string(nets::to_string(c.activation))},
              {"context_dim", c.context_dim},
              {"lr", c.lr},
              {"warmup_steps", c.warmup_steps},
              {"clip_norm", c.clip_norm},
              {"ema_decay", c.ema_decay},
              {"ema_start", c.ema_start},
              {"steps", c.steps},
              {"batch_size", c.batch_size},
              {"seed", c.seed},
              {"iou_samples", c.iou_samples}};
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kConfig, m); };
  if (!(sigma > 0.0)) fail("sigma must be positive");
  if (!(eps_scale > 0.0)) fail("eps_scale must be positive");
  if (!(sinkhorn_tol > 0.0)) fail("sinkhorn_tol must be positive");
  if (sinkhorn_iters < 1) fail("sinkhorn_iters must be >= 1");
  if (!(t_min > 0.0 && t_min < 0.5)) fail("t_min must lie in (0, 0.5)");
  for (auto h : hidden) {
    if (h < 1) fail("hidden widths must be >= 1");
  }
  if (context_dim < 0) fail("context_dim must be >= 0");
  if (!(lr > 0.0)) fail("lr must be positive");
  if (warmup_steps < 0) fail("warmup_steps must be >= 0");
  if (!(ema_decay >= 0.0 && ema_decay < 1.0)) fail("ema_decay must lie in [0, 1)");
  if (steps < 0) fail("steps must be >= 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (iou_samples < 1) fail("iou_samples must be >= 1");
}

nets::OptimConfig RunConfig::optim_config() const {
  nets::OptimConfig o;
  o.lr = lr;
  o.warmup_steps = warmup_steps;
  o.clip_norm = clip_norm;
  o.ema_decay = ema_decay;
  o.ema_start = resolved_ema_start();
  return o;
}

std::string run_config_to_json(const RunConfig& cfg) {
  json j = training_fields(cfg);
  j["source"] = cfg.source_path;
  j["target"] = cfg.target_path;
  j["out"] = cfg.out_path;
  return j.dump(2);
}

RunConfig run_config_from_json(const std::string& text, const RunConfig& defaults) {
  const json j = detail::parse_json(text, "run config");
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "run config must be a JSON object");
  static const std::set<std::string> known = {
      "cost", "eps", "eps_scale", "sinkhorn_tol", "sinkhorn_iters", "sigma", "lambda_variant",
      "flow_convention", "t_min", "hidden", "activation", "context_dim", "lr", "warmup_steps",
      "clip_norm", "ema_decay", "ema_start", "steps", "batch_size", "seed", "iou_samples",
      "source", "target", "out"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw Error(ErrorCode::kConfig, "unknown run config key '" + key + "'");
  }
  RunConfig c = defaults;
  try {
    if (j.contains("cost")) c.cost = costs::parse_cost_kind(j["cost"].get<std::string>());
    if (j.contains("eps")) c.eps = j["eps"].get<double>();
    if (j.contains("eps_scale")) c.eps_scale = j["eps_scale"].get<double>();
    if (j.contains("sinkhorn_tol")) c.sinkhorn_tol = j["sinkhorn_tol"].get<double>();
    if (j.contains("sinkhorn_iters")) c.sinkhorn_iters = j["sinkhorn_iters"].get<int>();
    if (j.contains("sigma")) c.sigma = j["sigma"].get<double>();
    if (j.contains("lambda_variant")) c.lambda_variant = bridge::parse_lambda_variant(j["lambda_variant"].get<std::string>());
    if (j.contains("flow_convention")) c.flow_convention = bridge::parse_flow_convention(j["flow_convention"].get<std::string>());
    if (j.contains("t_min")) c.t_min = j["t_min"].get<double>();
    if (j.contains("hidden")) c.hidden = j["hidden"].get<std::vector<Eigen::Index>>();
    if (j.contains("activation")) c.activation = nets::parse_activation(j["activation"].get<std::string>());
    if (j.contains("context_dim")) c.context_dim = j["context_dim"].get<Eigen::Index>();
    if (j.contains("lr")) c.lr = j["lr"].get<double>();
    if (j.contains("warmup_steps")) c.warmup_steps = j["warmup_steps"].get<long>();
    if (j.contains("clip_norm")) c.clip_norm = j["clip_norm"].get<double>();
    if (j.contains("ema_decay")) c.ema_decay = j["ema_decay"].get<double>();
    if (j.contains("ema_start")) c.ema_start = j["ema_start"].get<long>();
    if (j.contains("steps")) c.steps = j["steps"].get<long>();
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("iou_samples")) c.iou_samples = j["iou_samples"].get<std::size_t>();
    if (j.contains("source")) c.source_path = j["source"].get<std::string>();
    if (j.contains("target")) c.target_path = j["target"].get<std::string>();
    if (j.contains("out")) c.out_path = j["out"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("run config: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, "run config: " + e.detail());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path, const RunConfig& defaults) {
  return run_config_from_json(detail::read_text(path), defaults);
}

std::string config_fingerprint(const RunConfig& cfg) {
  const std::string text = training_fields(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace graspbridge::pipeline
