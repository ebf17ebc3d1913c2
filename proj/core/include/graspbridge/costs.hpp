#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "graspbridge/geometry.hpp"
#include "graspbridge/wrench.hpp"

namespace graspbridge::costs {

using Vector6d = Eigen::Matrix<double, 6, 1>;

enum class CostKind { kPose, kContact, kWrench, kJacobian };

std::string_view to_string(CostKind kind);
/// Accepts "pose", "contact", "wrench", "jacobian"; throws kInvalidInput otherwise.
CostKind parse_cost_kind(std::string_view name);

struct CostParams {
  CostKind kind = CostKind::kPose;
  std::size_t iou_samples = 100000;
  std::uint64_t seed = 0;
  // Active wrench coordinates for the overlap cost; 3 keeps only the force block.
  int wrench_dims = 3;
};

/// A grasp with whatever physical annotations are available. An absent field
/// (nullopt) is an annotation error for costs that need it; a present but
/// empty contact map / hull is a valid "no contact" annotation.
struct GraspAnnotation {
  geometry::GraspConfig config;
  std::optional<geometry::ContactMap> contact;
  std::optional<wrench::WrenchHull> wrenches;
  std::optional<Vector6d> manip;
  std::optional<Eigen::MatrixXd> jacobian;
};

/// Squared position distance plus squared Frobenius distance of the decoded rotations.
double d_pose(const geometry::GraspConfig& a, const geometry::GraspConfig& b);

/// Bidirectional Chamfer distance of the contact point sets.
double d_contact(const geometry::ContactMap& a, const geometry::ContactMap& b);

/// 1 - MC IoU. Degenerate hulls give the maximal cost 1.0 and set *degenerate.
double d_wrench(const wrench::WrenchHull& a, const wrench::WrenchHull& b, std::size_t n_samples,
                std::uint64_t seed, bool* degenerate = nullptr);

/// Per-row maximum absolute entry of a 6 x (n-6) Jacobian.
Vector6d max_effect(const Eigen::MatrixXd& J);

double d_jac(const Vector6d& a, const Vector6d& b);

struct CostMatrixStats {
  std::size_t penalized = 0;   // entries replaced by the empty-contact penalty
  std::size_t degenerate = 0;  // wrench pairs that fell back to cost 1.0
  double penalty = 0.0;
};

/// Entry (i, j) is the selected ground cost between batch_a[i] and batch_b[j].
/// Contact entries involving an empty map are replaced by the 99th percentile
/// of the finite entries of the same matrix.
Eigen::MatrixXd cost_matrix(const std::vector<GraspAnnotation>& batch_a,
                            const std::vector<GraspAnnotation>& batch_b, const CostParams& params,
                            CostMatrixStats* stats = nullptr);

/// Squared Euclidean cost between rows of two point matrices (latent-space cost).
Eigen::MatrixXd sq_euclidean_cost(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace graspbridge::costs
