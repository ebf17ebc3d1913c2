#pragma once

#include <string>

#include <Eigen/Core>

#include "graspbridge/geometry.hpp"

namespace graspbridge::pipeline {

/// Identity latent codec: z = [position (3), rot6 (6), joints, zero padding].
/// Hands with different joint counts share one width, max(n, m) + 9.
struct LatentCodec {
  Eigen::Index dim = 9;

  static constexpr Eigen::Index kBaseWidth = 9;
  static LatentCodec for_hands(int source_dof, int target_dof);

  /// Throws kConfig if the config has more joints than the latent can hold.
  Eigen::VectorXd encode(const geometry::GraspConfig& g) const;
  /// Keeps the first `dof` joint slots; the rotation code is returned as stored.
  geometry::GraspConfig decode(const Eigen::VectorXd& z, int dof, std::string hand_id) const;
};

}  // namespace graspbridge::pipeline
