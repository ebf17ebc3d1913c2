// Microbenchmarks for the inner loops of training and evaluation.

#include <benchmark/benchmark.h>

#include "graspbridge/bridge.hpp"
#include "graspbridge/geometry.hpp"
#include "graspbridge/nets.hpp"
#include "graspbridge/ot.hpp"
#include "graspbridge/random.hpp"
#include "graspbridge/wrench.hpp"

using namespace graspbridge;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = u(rng);
  return m;
}

geometry::PointCloud random_cloud(Rng& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  geometry::PointCloud pc;
  for (std::size_t i = 0; i < n; ++i) pc.points.emplace_back(g(rng), g(rng), g(rng));
  return pc;
}

void BM_Sinkhorn(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng rng = make_rng(1);
  const Eigen::MatrixXd C = random_matrix(rng, n, n);
  const double eps = ot::default_eps(C, 0.1);
  const auto a = ot::uniform_marginal(n);
  for (auto _ : state) benchmark::DoNotOptimize(ot::sinkhorn(C, a, a, eps));
}
BENCHMARK(BM_Sinkhorn)->Arg(64)->Arg(128)->Arg(256);

void BM_Chamfer(benchmark::State& state) {
  Rng rng = make_rng(2);
  const auto a = random_cloud(rng, static_cast<std::size_t>(state.range(0)));
  const auto b = random_cloud(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(geometry::chamfer(a, b));
}
BENCHMARK(BM_Chamfer)->Arg(16)->Arg(128)->Arg(1024);

void BM_HullMembership(benchmark::State& state) {
  Rng rng = make_rng(3);
  const Eigen::MatrixXd v = random_matrix(rng, 12, 6);
  const Eigen::VectorXd q = v.colwise().mean().transpose();
  for (auto _ : state) benchmark::DoNotOptimize(wrench::hull_membership(v, q));
}
BENCHMARK(BM_HullMembership);

void BM_MonteCarloIou(benchmark::State& state) {
  Rng rng = make_rng(4);
  wrench::WrenchHull a, b;
  a.vertices = random_matrix(rng, 10, 6);
  b.vertices = random_matrix(rng, 10, 6);
  a.dims = b.dims = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wrench::mc_hull_iou(a, b, 10000, 5));
}
BENCHMARK(BM_MonteCarloIou)->Arg(3)->Arg(6);

void BM_LossGrads(benchmark::State& state) {
  const Eigen::Index dim = 14;
  const auto v = nets::net_init(dim + nets::kTimeFeatures, {64, 64}, dim, 1);
  const auto s = nets::net_init(dim + nets::kTimeFeatures, {64, 64}, dim, 2);
  Rng rng = make_rng(5);
  std::vector<bridge::BridgeSample> batch;
  for (int i = 0; i < state.range(0); ++i) {
    const Eigen::VectorXd x0 = random_matrix(rng, dim, 1), x1 = random_matrix(rng, dim, 1);
    batch.push_back(bridge::training_targets(bridge::sample_time(rng), x0, x1, 0.1, rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(nets::loss_grads(v, s, batch));
}
BENCHMARK(BM_LossGrads)->Arg(16)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
