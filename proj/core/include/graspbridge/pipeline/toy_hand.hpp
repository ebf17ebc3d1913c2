#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "graspbridge/costs.hpp"
#include "graspbridge/geometry.hpp"
#include "graspbridge/random.hpp"

namespace graspbridge::pipeline {

/// Planar-fan toy hand: K straight fingers of length L hinged at the palm
/// centre, finger k swinging at azimuth phi_k by its single joint angle.
struct ToyHandSpec {
  std::string hand_id = "toy";
  int fingers = 5;
  double finger_length = 1.0;
  std::vector<double> azimuths;  // radians, strictly increasing in [0, 2 pi)
  double joint_min = 0.2;
  double joint_max = 0.5;

  int dof() const { return fingers; }
  /// Throws kConfig when the invariants do not hold.
  void validate() const;

  static ToyHandSpec evenly_spaced(std::string hand_id, int fingers, double finger_length);
};

inline constexpr double kBaseRadius = 1.9;
inline constexpr double kContactTau = 0.08;
inline constexpr std::size_t kObjectPoints = 2000;
inline constexpr double kJacobianStep = 1e-5;
inline constexpr int kMaxGraspRetries = 1000;

/// Unit sphere sampled on a Fibonacci lattice; normals point outward.
geometry::OrientedCloud fibonacci_sphere(std::size_t n = kObjectPoints);

/// Fingertip k = h + R * L * (sin a cos phi, sin a sin phi, cos a).
geometry::PointCloud fingertips(const ToyHandSpec& spec, const geometry::GraspConfig& g);

/// 6 x K central-difference Jacobian of the fingertip stack's mean motion
/// with respect to the joint angles. Rows 0-2: mean fingertip velocity;
/// rows 3-5: mean angular velocity about the object centre, p x dp / |p|^2.
Eigen::MatrixXd toy_jacobian(const ToyHandSpec& spec, const geometry::GraspConfig& g, double h = kJacobianStep);

/// Contact map (threshold kContactTau), inward-force wrenches, Jacobian and
/// max-effect vector. An empty contact map yields an empty wrench hull.
costs::GraspAnnotation annotate(const ToyHandSpec& spec, const geometry::OrientedCloud& object,
                                geometry::GraspConfig g);

/// Base on the sphere of radius kBaseRadius, palm facing the object centre
/// with a uniform roll, joints uniform in [joint_min, joint_max].
geometry::GraspConfig sample_grasp(const ToyHandSpec& spec, Rng& rng);

}  // namespace graspbridge::pipeline
