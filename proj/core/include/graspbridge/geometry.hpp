#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace graspbridge::geometry {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Rot6 = Eigen::Matrix<double, 6, 1>;

/// Ordered 3-D positions in meters.
struct PointCloud {
  std::vector<Vec3> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Points with one outward unit normal each (object surfaces, contact maps).
struct OrientedCloud {
  PointCloud cloud;
  std::vector<Vec3> normals;

  std::size_t size() const { return cloud.size(); }
  bool empty() const { return cloud.empty(); }
};

using ContactMap = OrientedCloud;

/// Position plus the 6-D continuous rotation code (first two columns of R).
struct BasePose {
  Vec3 position = Vec3::Zero();
  Rot6 rot6 = (Rot6() << 1, 0, 0, 0, 1, 0).finished();
};

/// Base pose plus one angle per joint (radians) for the hand named hand_id.
struct GraspConfig {
  BasePose base;
  Eigen::VectorXd joints;
  std::string hand_id;
};

inline constexpr double kOrthonormalTol = 1e-6;
inline constexpr double kDegenerateSeedTol = 1e-9;

/// Stacks the first and second columns of R. Throws kInvalidRotation if R is
/// not orthonormal within 1e-6 or has det <= 0.
Rot6 rot6d_encode(const Mat3& R);

/// Gram-Schmidt on the two stacked seeds; third column is their cross product.
/// Throws kInvalidRotation for a (near) zero first seed or parallel seeds.
Mat3 rot6d_decode(const Rot6& r6);

/// Sum over A of squared distance to the nearest point of B, plus the
/// symmetric term. Exact nearest neighbours. Throws kEmptyInput.
double chamfer(const PointCloud& a, const PointCloud& b);

/// Squared distance from q to the nearest point of cloud, and its index
/// (lowest index on ties). cloud must be nonempty.
std::pair<double, std::size_t> nearest(const PointCloud& cloud, const Vec3& q);

/// Object points (with normals) whose nearest hand point lies within tau.
/// Order follows the object cloud. The result may be empty.
ContactMap extract_contact_map(const OrientedCloud& object, const PointCloud& hand, double tau);

/// Deterministic greedy farthest-point sampling. The seed is the point
/// farthest from the centroid; every tie resolves to the lowest index.
std::vector<std::size_t> farthest_point_sample(const PointCloud& cloud, std::size_t k);

Vec3 centroid(const PointCloud& cloud);

/// CSV rows "x,y,z" or "x,y,z,nx,ny,nz", no header.
OrientedCloud read_cloud_csv(const std::filesystem::path& path);
void write_cloud_csv(const std::filesystem::path& path, const OrientedCloud& cloud);

}  // namespace graspbridge::geometry
