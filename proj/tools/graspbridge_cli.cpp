// graspbridge: generate toy grasp datasets, train a grasp bridge, translate
// grasps between hands and score the result.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "graspbridge/error.hpp"
#include "graspbridge/pipeline/checkpoint.hpp"
#include "graspbridge/pipeline/dataset.hpp"
#include "graspbridge/pipeline/metrics.hpp"
#include "graspbridge/pipeline/run_config.hpp"
#include "graspbridge/pipeline/train.hpp"
#include "graspbridge/pipeline/translate.hpp"

namespace gb = graspbridge;
namespace gp = graspbridge::pipeline;

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gb::Error(gb::ErrorCode::kInvalidInput, "cannot write " + path);
  out << text;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? std::to_string(*v) : "n/a"; }

struct GenArgs {
  std::string hand;
  std::size_t n = 256;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen(const GenArgs& a) {
  const gp::ToyHandSpec spec = gp::load_hand_spec(a.hand);
  const gp::Dataset data = gp::gen_dataset(spec, a.n, a.seed);
  gp::save_dataset(a.out, data);
  std::cerr << "wrote " << data.grasps.size() << " grasps for hand '" << spec.hand_id << "' to " << a.out << "\n";
  return 0;
}

struct TrainArgs {
  std::string config;
  std::optional<std::string> source, target, out, cost, lambda_variant, flow_convention;
  std::optional<double> sigma, eps, eps_scale, t_min, lr, sinkhorn_tol;
  std::optional<long> steps;
  std::optional<int> batch_size, sinkhorn_iters;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iou_samples;
  std::optional<std::vector<Eigen::Index>> hidden;
  std::string log_path;
  long log_every = 100;
};

int run_train(const TrainArgs& a) {
  gp::RunConfig cfg = a.config.empty() ? gp::RunConfig{} : gp::load_run_config(a.config);
  if (a.source) cfg.source_path = *a.source;
  if (a.target) cfg.target_path = *a.target;
  if (a.out) cfg.out_path = *a.out;
  if (a.cost) cfg.cost = gb::costs::parse_cost_kind(*a.cost);
  if (a.lambda_variant) cfg.lambda_variant = gb::bridge::parse_lambda_variant(*a.lambda_variant);
  if (a.flow_convention) cfg.flow_convention = gb::bridge::parse_flow_convention(*a.flow_convention);
  if (a.sigma) cfg.sigma = *a.sigma;
  if (a.eps) cfg.eps = *a.eps;
  if (a.eps_scale) cfg.eps_scale = *a.eps_scale;
  if (a.t_min) cfg.t_min = *a.t_min;
  if (a.lr) cfg.lr = *a.lr;
  if (a.sinkhorn_tol) cfg.sinkhorn_tol = *a.sinkhorn_tol;
  if (a.sinkhorn_iters) cfg.sinkhorn_iters = *a.sinkhorn_iters;
  if (a.steps) cfg.steps = *a.steps;
  if (a.batch_size) cfg.batch_size = *a.batch_size;
  if (a.seed) cfg.seed = *a.seed;
  if (a.iou_samples) cfg.iou_samples = *a.iou_samples;
  if (a.hidden) cfg.hidden = *a.hidden;
  if (cfg.source_path.empty() || cfg.target_path.empty() || cfg.out_path.empty()) {
    throw gb::Error(gb::ErrorCode::kConfig, "--source, --target and --out are required (flag or config file)");
  }
  cfg.validate();

  const gp::Dataset source = gp::load_dataset(cfg.source_path);
  const gp::Dataset target = gp::load_dataset(cfg.target_path);

  std::ofstream log_file;
  if (!a.log_path.empty()) {
    log_file.open(a.log_path);
    if (!log_file) throw gb::Error(gb::ErrorCode::kInvalidInput, "cannot write " + a.log_path);
    log_file << "step,loss,flow_loss,score_loss,flow_grad_norm,score_grad_norm,lr,eps,sinkhorn_iterations,marginal_error\n";
    log_file.precision(17);
  }
  const auto log = [&](const gp::TrainLogEntry& e) {
    if (log_file.is_open()) {
      log_file << e.step << ',' << e.loss << ',' << e.flow_loss << ',' << e.score_loss << ',' << e.flow_grad_norm << ','
               << e.score_grad_norm << ',' << e.lr << ',' << e.eps << ',' << e.sinkhorn_iterations << ','
               << e.marginal_error << '\n';
    }
    if (a.log_every > 0 && (e.step % a.log_every == 0 || e.step == 1 || e.step == cfg.steps)) {
      std::fprintf(stderr, "step %6ld  loss %.6g  flow %.6g  score %.6g  eps %.3g\n", e.step, e.loss, e.flow_loss,
                   e.score_loss, e.eps);
    }
  };
  const gp::Checkpoint ckpt = gp::train(source, target, cfg, log);
  gp::save_checkpoint(cfg.out_path, ckpt);
  std::cerr << "wrote checkpoint " << cfg.out_path << " (fingerprint " << ckpt.fingerprint << ")\n";
  return 0;
}

struct TranslateArgs {
  std::string ckpt, in, out;
  int steps = 100;
  int n_samples = 1;
  std::uint64_t seed = 0;
  std::string method = "em";
  std::optional<std::string> score_scale;
  bool raw_weights = false;
};

int run_translate(const TranslateArgs& a) {
  const gp::Checkpoint ckpt = gp::load_checkpoint(a.ckpt);
  const gp::Dataset source = gp::load_dataset(a.in);
  gp::TranslateOptions opt;
  opt.n_steps = a.steps;
  opt.samples_per_input = a.n_samples;
  opt.seed = a.seed;
  opt.method = gp::parse_translate_method(a.method);
  if (a.score_scale) opt.score_scale = gb::sampler::parse_score_scale(*a.score_scale);
  opt.use_ema = !a.raw_weights;
  const gp::Dataset out = gp::translate_dataset(ckpt, source, opt);
  gp::save_dataset(a.out, out);
  std::size_t with_contact = 0;
  for (const auto& g : out.grasps) with_contact += g.contact && !g.contact->empty();
  std::cerr << "translated " << out.grasps.size() << " grasps to hand '" << out.hand.hand_id << "' ("
            << with_contact << " with contact) -> " << a.out << "\n";
  return 0;
}

struct EvalArgs {
  std::string source, translated, out;
  std::size_t iou_samples = 100000;
  std::uint64_t seed = 0;
};

int run_eval(const EvalArgs& a) {
  const gp::Dataset source = gp::load_dataset(a.source);
  const gp::Dataset translated = gp::load_dataset(a.translated);
  const gp::AlignmentReport r = gp::eval_alignment(source.grasps, translated.grasps, a.iou_samples, a.seed);
  gp::save_metrics(a.out, r);
  std::cout << "pairs          " << r.pairs.size() << "\n"
            << "mean 6-D IoU   " << fmt_opt(r.mean_iou) << " (" << r.iou_valid << " valid, " << r.iou_missing
            << " missing)\n"
            << "contact rate   " << r.contact_rate << "\n"
            << "mean d_pose    " << r.mean_d_pose << "\n"
            << "mean d_contact " << fmt_opt(r.mean_d_contact) << "\n"
            << "mean d_jac     " << r.mean_d_jac << "\n"
            << "diversity      " << fmt_opt(r.source_diversity) << " -> " << fmt_opt(r.translated_diversity) << "\n";
  return 0;
}

struct ReportArgs {
  std::string metrics, plot, csv;
};

int run_report(const ReportArgs& a) {
  const gp::AlignmentReport r = gp::load_metrics(a.metrics);
  if (!a.plot.empty()) write_file(a.plot, gp::metrics_svg(r));
  if (!a.csv.empty()) write_file(a.csv, gp::metrics_csv(r));
  if (a.plot.empty() && a.csv.empty()) std::cout << gp::metrics_csv(r);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schrodinger-bridge grasp translation between toy hands"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a toy-hand grasp dataset on the unit sphere");
  g->add_option("--hand", gen.hand, "Hand spec JSON")->required()->check(CLI::ExistingFile);
  g->add_option("--n", gen.n, "Number of grasps")->check(CLI::PositiveNumber);
  g->add_option("--seed", gen.seed, "Generator seed");
  g->add_option("--out", gen.out, "Output dataset JSON")->required();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train flow and score networks with minibatch entropic OT pairing");
  t->add_option("--config", tr.config, "RunConfig JSON; flags override its values")->check(CLI::ExistingFile);
  t->add_option("--source", tr.source, "Source dataset JSON");
  t->add_option("--target", tr.target, "Target dataset JSON");
  t->add_option("--out", tr.out, "Output checkpoint");
  t->add_option("--cost", tr.cost, "Ground cost")->check(CLI::IsMember({"pose", "contact", "wrench", "jacobian"}));
  t->add_option("--sigma", tr.sigma, "Bridge diffusion rate");
  t->add_option("--steps", tr.steps, "Optimizer steps");
  t->add_option("--eps", tr.eps, "Absolute entropic regularization (overrides --eps-scale)");
  t->add_option("--eps-scale", tr.eps_scale, "eps as a multiple of the median batch cost");
  t->add_option("--seed", tr.seed, "Training seed");
  t->add_option("--batch-size", tr.batch_size, "Minibatch size per side");
  t->add_option("--iou-samples", tr.iou_samples, "Monte-Carlo samples per wrench IoU");
  t->add_option("--lambda-variant", tr.lambda_variant, "Score-loss weighting")
      ->check(CLI::IsMember({"rescaled", "unit-variance", "unitvar"}));
  t->add_option("--flow-convention", tr.flow_convention, "Conditional flow prefactor")
      ->check(CLI::IsMember({"derived", "literal"}));
  t->add_option("--t-min", tr.t_min, "Time support is [t_min, 1 - t_min]");
  t->add_option("--lr", tr.lr, "Peak learning rate");
  t->add_option("--sinkhorn-tol", tr.sinkhorn_tol, "Sinkhorn marginal tolerance");
  t->add_option("--sinkhorn-iters", tr.sinkhorn_iters, "Sinkhorn iteration cap");
  t->add_option("--hidden", tr.hidden, "Hidden layer widths");
  t->add_option("--log", tr.log_path, "Per-step loss log (CSV)");
  t->add_option("--log-every", tr.log_every, "Progress line interval on stderr (0 = quiet)");

  TranslateArgs tl;
  auto* x = app.add_subcommand("translate", "Translate source-hand grasps to the target hand");
  x->add_option("--ckpt", tl.ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  x->add_option("--in", tl.in, "Source dataset JSON")->required()->check(CLI::ExistingFile);
  x->add_option("--out", tl.out, "Output dataset JSON")->required();
  x->add_option("--steps", tl.steps, "Integration steps")->check(CLI::PositiveNumber);
  x->add_option("--seed", tl.seed, "Sampling seed");
  x->add_option("--n-samples", tl.n_samples, "Draws per source grasp (grouped by input)")->check(CLI::PositiveNumber);
  x->add_option("--method", tl.method, "em (stochastic) or the deterministic euler / rk4")
      ->check(CLI::IsMember({"em", "euler", "rk4"}));
  x->add_option("--score-scale", tl.score_scale, "Must match the checkpoint's convention")
      ->check(CLI::IsMember({"rescaled", "unitvar"}));
  x->add_flag("--raw-weights", tl.raw_weights, "Use raw instead of EMA weights");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Score translated grasps against their sources");
  e->add_option("--source", ev.source, "Source dataset JSON")->required()->check(CLI::ExistingFile);
  e->add_option("--translated", ev.translated, "Translated dataset JSON")->required()->check(CLI::ExistingFile);
  e->add_option("--iou-samples", ev.iou_samples, "Monte-Carlo samples per pair")->check(CLI::PositiveNumber);
  e->add_option("--seed", ev.seed, "IoU sampling seed");
  e->add_option("--out", ev.out, "Output metrics JSON")->required();

  ReportArgs rp;
  auto* r = app.add_subcommand("report", "Render a metrics file as SVG and/or CSV");
  r->add_option("--metrics", rp.metrics, "Metrics JSON")->required()->check(CLI::ExistingFile);
  r->add_option("--plot", rp.plot, "SVG output");
  r->add_option("--csv", rp.csv, "CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*g) return run_gen(gen);
    if (*t) return run_train(tr);
    if (*x) return run_translate(tl);
    if (*e) return run_eval(ev);
    if (*r) return run_report(rp);
  } catch (const gb::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return gb::exit_code_for(err.code());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 2;
}
