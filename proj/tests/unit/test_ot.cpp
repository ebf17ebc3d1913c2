#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "graspbridge/error.hpp"
#include "graspbridge/ot.hpp"

using namespace graspbridge;
using namespace graspbridge::ot;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidInput;
}

double best_permutation_cost(const Eigen::MatrixXd& C) {
  std::vector<int> perm(static_cast<std::size_t>(C.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double s = 0.0;
    for (Eigen::Index i = 0; i < C.rows(); ++i) s += C(i, perm[static_cast<std::size_t>(i)]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(C.rows());
}

void expect_feasible(const TransportPlan& p, double tol) {
  EXPECT_TRUE((p.pi.array() >= 0.0).all());
  EXPECT_LE((p.pi.rowwise().sum() - p.a).cwiseAbs().maxCoeff(), std::max(tol, p.marginal_error) + 1e-15);
  EXPECT_LE((p.pi.colwise().sum().transpose() - p.b).cwiseAbs().maxCoeff(), std::max(tol, p.marginal_error) + 1e-15);
}

}  // namespace

TEST(Sinkhorn, ConstantCostGivesOuterProduct) {
  Rng rng = make_rng(41);
  Eigen::VectorXd a = gbtest::random_simplex(rng, 4), b = gbtest::random_simplex(rng, 6);
  Eigen::MatrixXd C = Eigen::MatrixXd::Constant(4, 6, 2.5);
  TransportPlan p = sinkhorn(C, a, b, 0.3);
  EXPECT_LT((p.pi - a * b.transpose()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_TRUE(p.converged);
}

TEST(Sinkhorn, LargeEpsIsNearlyUniform) {
  Eigen::MatrixXd C(2, 2);
  C << 0, 1, 1, 0;
  TransportPlan p = sinkhorn(C, uniform_marginal(2), uniform_marginal(2), 100.0);
  // Closed form: diagonal 0.5 / (1 + e^{-1/eps}), about 0.25125.
  const double diag = 0.5 / (1 + std::exp(-0.01));
  EXPECT_NEAR(p.pi(0, 0), diag, 1e-9);
  EXPECT_NEAR(p.pi(0, 1), 0.5 - diag, 1e-9);
  EXPECT_LT((p.pi.array() - 0.25).abs().maxCoeff(), 1.3e-3);
}

TEST(Sinkhorn, SmallEpsMatchesBestPermutation) {
  Rng rng = make_rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd C = gbtest::uniform_mat(rng, 5, 5, 0.0, 1.0);
    TransportPlan p = sinkhorn(C, uniform_marginal(5), uniform_marginal(5), 1e-3 * C.maxCoeff());
    const double best = best_permutation_cost(C);
    EXPECT_LE(std::abs(transport_cost(p, C) - best), 0.01 * best) << "trial " << trial;
  }
}

TEST(Sinkhorn, MarginalsWithinReportedErrorAndMassOne) {
  Rng rng = make_rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = gbtest::uniform_int(rng, 2, 20), m = gbtest::uniform_int(rng, 2, 20);
    Eigen::MatrixXd C = gbtest::uniform_mat(rng, n, m, 0.0, 3.0);
    TransportPlan p = sinkhorn(C, gbtest::random_simplex(rng, n), gbtest::random_simplex(rng, m), default_eps(C));
    EXPECT_TRUE(p.converged);
    EXPECT_LT(p.marginal_error, 1e-6);
    expect_feasible(p, 1e-6);
    EXPECT_NEAR(p.pi.sum(), 1.0, 1e-6);
  }
}

TEST(Sinkhorn, NonConvergenceIsFlagged) {
  Rng rng = make_rng(44);
  Eigen::MatrixXd C = gbtest::uniform_mat(rng, 10, 10, 0.0, 1.0);
  TransportPlan p = sinkhorn(C, uniform_marginal(10), uniform_marginal(10), 1e-3, SinkhornOptions{1e-14, 3});
  EXPECT_FALSE(p.converged);
  EXPECT_EQ(p.iterations_used, 3);
  EXPECT_GT(p.marginal_error, 1e-14);
}

TEST(Sinkhorn, TransportCostNonIncreasingAsEpsShrinks) {
  Rng rng = make_rng(45);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd C = gbtest::uniform_mat(rng, 8, 8, 0.0, 1.0);
    double prev = INFINITY;
    for (double eps : {10.0, 1.0, 0.1, 0.01}) {
      TransportPlan p = sinkhorn(C, uniform_marginal(8), uniform_marginal(8), eps, SinkhornOptions{1e-12, 100000});
      const double cost = transport_cost(p, C);
      EXPECT_LE(cost, prev + 1e-9) << "eps " << eps;
      prev = cost;
    }
  }
}

TEST(Sinkhorn, TransposeSymmetry) {
  Rng rng = make_rng(46);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd C = gbtest::uniform_mat(rng, 6, 9, 0.0, 2.0);
    Eigen::VectorXd a = gbtest::random_simplex(rng, 6), b = gbtest::random_simplex(rng, 9);
    const SinkhornOptions tight{1e-13, 100000};
    TransportPlan p = sinkhorn(C, a, b, 0.2, tight);
    TransportPlan q = sinkhorn(C.transpose(), b, a, 0.2, tight);
    EXPECT_LT((p.pi.transpose() - q.pi).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Sinkhorn, InputValidation) {
  Eigen::MatrixXd C = Eigen::MatrixXd::Ones(2, 2);
  Eigen::VectorXd u = uniform_marginal(2);
  Eigen::MatrixXd bad = C;
  bad(0, 1) = NAN;
  EXPECT_EQ(code_of([&] { sinkhorn(bad, u, u, 0.1); }), ErrorCode::kInvalidInput);
  bad(0, 1) = -1.0;
  EXPECT_EQ(code_of([&] { sinkhorn(bad, u, u, 0.1); }), ErrorCode::kInvalidInput);
  EXPECT_EQ(code_of([&] { sinkhorn(C, u, u, 0.0); }), ErrorCode::kInvalidInput);
  Eigen::VectorXd off(2);
  off << 0.5, 0.6;
  EXPECT_EQ(code_of([&] { sinkhorn(C, off, u, 0.1); }), ErrorCode::kInvalidInput);
  Eigen::VectorXd zero(2);
  zero << 1.0, 0.0;
  EXPECT_EQ(code_of([&] { sinkhorn(C, zero, u, 0.1); }), ErrorCode::kInvalidInput);
  EXPECT_EQ(code_of([&] { sinkhorn(C, uniform_marginal(3), u, 0.1); }), ErrorCode::kShape);
}

TEST(DefaultEps, MedianOfPositiveEntries) {
  Eigen::MatrixXd C(2, 3);
  C << 0, 1, 2, 3, 4, 0;
  EXPECT_DOUBLE_EQ(default_eps(C, 0.1), 0.25);
  Eigen::MatrixXd odd(1, 3);
  odd << 5, 1, 3;
  EXPECT_DOUBLE_EQ(default_eps(odd, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(default_eps(Eigen::MatrixXd::Zero(2, 2), 0.1), 0.1);
}

TEST(SamplePairs, DiagonalPlanOnlyYieldsDiagonal) {
  TransportPlan p;
  p.pi = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  for (const auto& [i, j] : sample_pairs(p, 5000, 3)) EXPECT_EQ(i, j);
}

TEST(SamplePairs, UniformFrequencies) {
  TransportPlan p;
  p.pi = Eigen::MatrixXd::Constant(2, 2, 0.25);
  const std::size_t n = 100000;
  Eigen::Matrix2d counts = Eigen::Matrix2d::Zero();
  for (const auto& [i, j] : sample_pairs(p, n, 4)) counts(i, j) += 1;
  EXPECT_LT((counts.array() / static_cast<double>(n) - 0.25).abs().maxCoeff(), 0.01);
}

TEST(SamplePairs, ChiSquareAgainstPlan) {
  Rng rng = make_rng(47);
  Eigen::MatrixXd C = gbtest::uniform_mat(rng, 4, 5, 0.0, 1.0);
  TransportPlan p = sinkhorn(C, uniform_marginal(4), uniform_marginal(5), 0.2);
  const std::size_t n = 100000;
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(4, 5);
  for (const auto& [i, j] : sample_pairs(p, n, 5)) counts(i, j) += 1;
  const Eigen::MatrixXd expected = p.pi / p.pi.sum() * static_cast<double>(n);
  const double chi2 = ((counts - expected).array().square() / expected.array()).sum();
  // 19 degrees of freedom; the 0.999 quantile is about 43.8.
  EXPECT_LT(chi2, 43.8);
}

TEST(SamplePairs, EdgeCases) {
  TransportPlan p;
  p.pi = Eigen::MatrixXd::Constant(2, 2, 0.25);
  EXPECT_TRUE(sample_pairs(p, 0, 1).empty());
  EXPECT_EQ(sample_pairs(p, 50, 9), sample_pairs(p, 50, 9));
  TransportPlan zero;
  zero.pi = Eigen::MatrixXd::Zero(3, 3);
  EXPECT_EQ(code_of([&] { sample_pairs(zero, 1, 1); }), ErrorCode::kDegeneratePlan);
  TransportPlan tail;
  tail.pi = Eigen::MatrixXd::Zero(2, 2);
  tail.pi(0, 0) = 1.0;
  for (const auto& [i, j] : sample_pairs(tail, 1000, 2)) {
    EXPECT_EQ(i, 0);
    EXPECT_EQ(j, 0);
  }
}
