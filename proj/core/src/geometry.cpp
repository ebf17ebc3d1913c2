#include "graspbridge/geometry.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "graspbridge/error.hpp"
#include "graspbridge/parallel.hpp"

namespace graspbridge::geometry {
namespace {

// Below this many pair evaluations the thread start-up costs more than it saves.
constexpr std::size_t kParallelWork = 1u << 16;

double directed_chamfer(const PointCloud& from, const PointCloud& to) {
  std::vector<double> best(from.size());
  auto body = [&](std::size_t i) { best[i] = nearest(to, from.points[i]).first; };
  if (from.size() * to.size() >= kParallelWork) {
    parallel_for(from.size(), body);
  } else {
    for (std::size_t i = 0; i < from.size(); ++i) body(i);
  }
  double sum = 0.0;
  for (double d : best) sum += d;
  return sum;
}

}  // namespace

Rot6 rot6d_encode(const Mat3& R) {
  if (!R.allFinite()) throw Error(ErrorCode::kInvalidRotation, "non-finite rotation matrix");
  double dev = (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (dev > kOrthonormalTol) {
    throw Error(ErrorCode::kInvalidRotation,
                "matrix is not orthonormal (max |R^T R - I| = " + std::to_string(dev) + ")");
  }
  if (R.determinant() <= 0.0) throw Error(ErrorCode::kInvalidRotation, "determinant is not positive");
  Rot6 r6;
  r6 << R.col(0), R.col(1);
  return r6;
}

Mat3 rot6d_decode(const Rot6& r6) {
  if (!r6.allFinite()) throw Error(ErrorCode::kInvalidRotation, "non-finite 6-D rotation");
  Vec3 a = r6.head<3>();
  Vec3 b = r6.tail<3>();
  double na = a.norm();
  if (na <= kDegenerateSeedTol) throw Error(ErrorCode::kInvalidRotation, "first rotation seed is zero");
  Vec3 c1 = a / na;
  Vec3 u = b - b.dot(c1) * c1;
  double nu = u.norm();
  if (nu <= kDegenerateSeedTol) throw Error(ErrorCode::kInvalidRotation, "rotation seeds are parallel");
  Vec3 c2 = u / nu;
  Mat3 R;
  R.col(0) = c1;
  R.col(1) = c2;
  R.col(2) = c1.cross(c2);
  return R;
}

std::pair<double, std::size_t> nearest(const PointCloud& cloud, const Vec3& q) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t idx = 0;
  for (std::size_t j = 0; j < cloud.points.size(); ++j) {
    double d = (cloud.points[j] - q).squaredNorm();
    if (d < best) {
      best = d;
      idx = j;
    }
  }
  return {best, idx};
}

double chamfer(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kEmptyInput, "chamfer of an empty cloud");
  return directed_chamfer(a, b) + directed_chamfer(b, a);
}

ContactMap extract_contact_map(const OrientedCloud& object, const PointCloud& hand, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidInput, "contact threshold must be positive");
  if (object.empty()) throw Error(ErrorCode::kEmptyInput, "object cloud is empty");
  if (object.normals.size() != object.size()) {
    throw Error(ErrorCode::kShape, "object cloud needs one normal per point");
  }
  ContactMap out;
  if (hand.empty()) return out;
  const double tau2 = tau * tau;
  for (std::size_t i = 0; i < object.size(); ++i) {
    if (nearest(hand, object.cloud.points[i]).first <= tau2) {
      out.cloud.points.push_back(object.cloud.points[i]);
      out.normals.push_back(object.normals[i]);
    }
  }
  return out;
}

Vec3 centroid(const PointCloud& cloud) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : cloud.points) c += p;
  return cloud.empty() ? c : Vec3(c / static_cast<double>(cloud.size()));
}

std::vector<std::size_t> farthest_point_sample(const PointCloud& cloud, std::size_t k) {
  const std::size_t n = cloud.size();
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kBounds,
                "sample count " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  const Vec3 c = centroid(cloud);
  std::size_t seed = 0;
  double far = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = (cloud.points[i] - c).squaredNorm();
    if (d > far) {
      far = d;
      seed = i;
    }
  }
  std::vector<std::size_t> picked{seed};
  picked.reserve(k);
  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  std::vector<bool> taken(n, false);
  taken[seed] = true;
  while (picked.size() < k) {
    const Vec3& last = cloud.points[picked.back()];
    std::size_t next = n;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      min_dist[i] = std::min(min_dist[i], (cloud.points[i] - last).squaredNorm());
      if (min_dist[i] > best) {
        best = min_dist[i];
        next = i;
      }
    }
    taken[next] = true;
    picked.push_back(next);
  }
  return picked;
}

}  // namespace graspbridge::geometry
