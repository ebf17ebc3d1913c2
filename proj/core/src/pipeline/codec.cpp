#include "graspbridge/pipeline/codec.hpp"

#include <algorithm>

#include "graspbridge/error.hpp"

namespace graspbridge::pipeline {

LatentCodec LatentCodec::for_hands(int source_dof, int target_dof) {
  return LatentCodec{kBaseWidth + std::max(source_dof, target_dof)};
}

Eigen::VectorXd LatentCodec::encode(const geometry::GraspConfig& g) const {
  if (kBaseWidth + g.joints.size() > dim) {
    throw Error(ErrorCode::kConfig, "config with " + std::to_string(g.joints.size()) +
                                        " joints does not fit latent width " + std::to_string(dim));
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(dim);
  z.head<3>() = g.base.position;
  z.segment<6>(3) = g.base.rot6;
  z.segment(kBaseWidth, g.joints.size()) = g.joints;
  return z;
}

geometry::GraspConfig LatentCodec::decode(const Eigen::VectorXd& z, int dof, std::string hand_id) const {
  if (z.size() != dim) throw Error(ErrorCode::kShape, "latent has the wrong width");
  if (dof < 0 || kBaseWidth + dof > dim) throw Error(ErrorCode::kConfig, "joint count does not fit the latent");
  geometry::GraspConfig g;
  g.base.position = z.head<3>();
  g.base.rot6 = z.segment<6>(3);
  g.joints = z.segment(kBaseWidth, dof);
  g.hand_id = std::move(hand_id);
  return g;
}

}  // namespace graspbridge::pipeline
