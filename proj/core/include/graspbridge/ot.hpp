#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace graspbridge::ot {

/// Entropic coupling between a row marginal `a` and a column marginal `b`.
struct TransportPlan {
  Eigen::MatrixXd pi;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  double eps = 0.0;
  int iterations_used = 0;
  double marginal_error = 0.0;  // max |row/col sum - marginal|
  bool converged = false;
};

struct SinkhornOptions {
  double tol = 1e-6;
  int max_iter = 10000;
};

/// Log-domain Sinkhorn on dual potentials (f, g) with stabilized
/// log-sum-exp; pi_ij = exp((f_i + g_j - C_ij) / eps). Stops once the row
/// violation of the current plan drops below tol (columns are exact after
/// each g update). A plan that hits max_iter is returned with converged =
/// false and its marginal_error above tol.
TransportPlan sinkhorn(const Eigen::MatrixXd& C, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       double eps, const SinkhornOptions& options = {});

/// scale * median of the strictly positive entries of C (scale alone if none).
double default_eps(const Eigen::MatrixXd& C, double scale = 0.1);

Eigen::VectorXd uniform_marginal(Eigen::Index n);

/// sum_ij pi_ij C_ij
double transport_cost(const TransportPlan& plan, const Eigen::MatrixXd& C);

using IndexPair = std::pair<Eigen::Index, Eigen::Index>;

/// n independent categorical draws over the normalized flattened plan.
std::vector<IndexPair> sample_pairs(const TransportPlan& plan, std::size_t n, std::uint64_t seed);

}  // namespace graspbridge::ot
