#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "graspbridge/geometry.hpp"

namespace graspbridge::wrench {

using geometry::Vec3;
using Wrench = Eigen::Matrix<double, 6, 1>;

struct ContactPoint {
  Vec3 c = Vec3::Zero();
  Vec3 n = Vec3::UnitZ();  // unit force direction
  double alpha = 1.0;      // force scale, N
};

/// Contact-derived wrench vertex set. `vertices` always holds full 6-D
/// wrenches (force, torque) as rows; `dims` selects how many leading
/// coordinates are active (3 = force-only reduction, 6 = full GWH).
struct WrenchHull {
  Eigen::MatrixXd vertices = Eigen::MatrixXd(0, 6);
  int dims = 6;

  Eigen::MatrixXd active() const { return vertices.leftCols(dims); }
  std::size_t size() const { return static_cast<std::size_t>(vertices.rows()); }
};

inline constexpr double kMembershipTol = 1e-9;
inline constexpr double kFlatTol = 1e-9;

/// w = [f; c x f] with f = alpha * n, one vertex per contact.
WrenchHull build_wrenches(std::span<const ContactPoint> contacts);

/// Contacts pushing into the object: force direction is the negated outward
/// normal of every contact-map point.
std::vector<ContactPoint> inward_contacts(const geometry::ContactMap& map, double alpha = 1.0);

/// Same vertices with only the force block active.
WrenchHull reduce_to_forces(const WrenchHull& hull);

/// True when the centered vertex matrix has a singular value below kFlatTol
/// (or too few vertices to span the dimension).
bool is_flat(const Eigen::MatrixXd& vertices);

/// Convex-combination feasibility: does some lambda >= 0 with sum 1 reproduce
/// the query within tol (L1 residual)? Vertices are rows.
bool hull_membership(const Eigen::MatrixXd& vertices, const Eigen::VectorXd& query,
                     double tol = kMembershipTol);

/// Reusable membership test for one vertex set. In three dimensions with a
/// full-volume vertex set the supporting facet halfspaces are enumerated once;
/// otherwise each query solves the feasibility LP.
class HullOracle {
 public:
  explicit HullOracle(Eigen::MatrixXd vertices, double tol = kMembershipTol);

  bool contains(const Eigen::Ref<const Eigen::VectorXd>& q) const;
  bool contains_lp(const Eigen::Ref<const Eigen::VectorXd>& q) const;

  bool uses_facets() const { return use_facets_; }
  Eigen::Index dims() const { return vertices_.cols(); }
  std::size_t facet_count() const { return static_cast<std::size_t>(normals_.rows()); }

 private:
  Eigen::MatrixXd vertices_;
  Eigen::VectorXd lo_, hi_;
  Eigen::MatrixXd normals_;  // rows: outward unit normals
  Eigen::VectorXd offsets_;
  double tol_;
  bool use_facets_ = false;
};

struct IouEstimate {
  double iou = 0.0;
  std::size_t in_both = 0;
  std::size_t in_either = 0;
  std::size_t samples = 0;
  int effective_dims = 0;  // active coordinates that were not collapsed
};

/// Monte-Carlo IoU of two hulls over their joint axis-aligned bounding box.
/// Each sample is drawn once and tested against both hulls, so the estimate
/// is symmetric in (a, b) and exactly 1 for identical vertex sets.
/// Coordinates on which every vertex of both hulls agrees (box extent below
/// kFlatTol) are dropped before sampling; the remaining projection must have
/// positive volume for each hull or kDegenerateHull is thrown.
IouEstimate mc_hull_iou_detail(const WrenchHull& a, const WrenchHull& b, std::size_t n_samples,
                               std::uint64_t seed);

double mc_hull_iou(const WrenchHull& a, const WrenchHull& b, std::size_t n_samples,
                   std::uint64_t seed);

}  // namespace graspbridge::wrench
