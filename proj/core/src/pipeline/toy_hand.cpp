#include "graspbridge/pipeline/toy_hand.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "graspbridge/error.hpp"
#include "graspbridge/wrench.hpp"

namespace graspbridge::pipeline {

using geometry::Mat3;
using geometry::Vec3;

void ToyHandSpec::validate() const {
  if (fingers < 2) throw Error(ErrorCode::kConfig, "toy hand needs at least two fingers");
  if (!(finger_length > 0.0)) throw Error(ErrorCode::kConfig, "finger length must be positive");
  if (static_cast<int>(azimuths.size()) != fingers) {
    throw Error(ErrorCode::kConfig, "hand '" + hand_id + "' needs one azimuth per finger");
  }
  for (std::size_t k = 0; k < azimuths.size(); ++k) {
    if (!(azimuths[k] >= 0.0 && azimuths[k] < 2.0 * std::numbers::pi)) {
      throw Error(ErrorCode::kConfig, "azimuths must lie in [0, 2 pi)");
    }
    if (k > 0 && !(azimuths[k] > azimuths[k - 1])) {
      throw Error(ErrorCode::kConfig, "azimuths must be strictly increasing");
    }
  }
  if (!(joint_min < joint_max)) throw Error(ErrorCode::kConfig, "joint range is empty");
}

ToyHandSpec ToyHandSpec::evenly_spaced(std::string hand_id, int fingers, double finger_length) {
  ToyHandSpec spec;
  spec.hand_id = std::move(hand_id);
  spec.fingers = fingers;
  spec.finger_length = finger_length;
  for (int k = 0; k < fingers; ++k) spec.azimuths.push_back(2.0 * std::numbers::pi * k / fingers);
  return spec;
}

geometry::OrientedCloud fibonacci_sphere(std::size_t n) {
  geometry::OrientedCloud out;
  out.cloud.points.reserve(n);
  out.normals.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    double y = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    double r = std::sqrt(std::max(0.0, 1.0 - y * y));
    double theta = golden * static_cast<double>(i);
    Vec3 p(r * std::cos(theta), y, r * std::sin(theta));
    p.normalize();
    out.cloud.points.push_back(p);
    out.normals.push_back(p);
  }
  return out;
}

geometry::PointCloud fingertips(const ToyHandSpec& spec, const geometry::GraspConfig& g) {
  if (g.joints.size() != spec.dof()) {
    throw Error(ErrorCode::kShape, "hand '" + spec.hand_id + "' has " + std::to_string(spec.dof()) +
                                       " joints, config has " + std::to_string(g.joints.size()));
  }
  const Mat3 R = geometry::rot6d_decode(g.base.rot6);
  geometry::PointCloud tips;
  tips.points.reserve(static_cast<std::size_t>(spec.fingers));
  for (int k = 0; k < spec.fingers; ++k) {
    const double a = g.joints(k);
    const double phi = spec.azimuths[static_cast<std::size_t>(k)];
    Vec3 local(std::sin(a) * std::cos(phi), std::sin(a) * std::sin(phi), std::cos(a));
    tips.points.push_back(g.base.position + R * (spec.finger_length * local));
  }
  return tips;
}

Eigen::MatrixXd toy_jacobian(const ToyHandSpec& spec, const geometry::GraspConfig& g, double h) {
  const geometry::PointCloud nominal = fingertips(spec, g);
  const double inv_k = 1.0 / static_cast<double>(spec.fingers);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, spec.dof());
  for (int j = 0; j < spec.dof(); ++j) {
    geometry::GraspConfig plus = g, minus = g;
    plus.joints(j) += h;
    minus.joints(j) -= h;
    const geometry::PointCloud tp = fingertips(spec, plus);
    const geometry::PointCloud tm = fingertips(spec, minus);
    Vec3 lin = Vec3::Zero();
    Vec3 ang = Vec3::Zero();
    for (std::size_t k = 0; k < nominal.size(); ++k) {
      const Vec3 vel = (tp.points[k] - tm.points[k]) / (2.0 * h);
      const Vec3& p = nominal.points[k];
      lin += vel;
      ang += p.cross(vel) / p.squaredNorm();
    }
    J.block<3, 1>(0, j) = lin * inv_k;
    J.block<3, 1>(3, j) = ang * inv_k;
  }
  return J;
}

costs::GraspAnnotation annotate(const ToyHandSpec& spec, const geometry::OrientedCloud& object,
                                geometry::GraspConfig g) {
  costs::GraspAnnotation a;
  const geometry::PointCloud tips = fingertips(spec, g);
  a.contact = geometry::extract_contact_map(object, tips, kContactTau);
  if (a.contact->empty()) {
    a.wrenches = wrench::WrenchHull{};
  } else {
    const auto contacts = wrench::inward_contacts(*a.contact);
    a.wrenches = wrench::build_wrenches(contacts);
  }
  a.jacobian = toy_jacobian(spec, g);
  a.manip = costs::max_effect(*a.jacobian);
  g.hand_id = spec.hand_id;
  a.config = std::move(g);
  return a;
}

geometry::GraspConfig sample_grasp(const ToyHandSpec& spec, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec3 d;
  do {
    d = Vec3(normal(rng), normal(rng), normal(rng));
  } while (d.norm() < 1e-12);
  d.normalize();

  const Vec3 z = -d;
  const Vec3 helper = std::abs(z.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 x0 = (helper - helper.dot(z) * z).normalized();
  const Vec3 y0 = z.cross(x0);
  std::uniform_real_distribution<double> roll_dist(0.0, 2.0 * std::numbers::pi);
  const double roll = roll_dist(rng);
  const Vec3 x = std::cos(roll) * x0 + std::sin(roll) * y0;
  Mat3 R;
  R.col(0) = x;
  R.col(1) = z.cross(x);
  R.col(2) = z;

  geometry::GraspConfig g;
  g.hand_id = spec.hand_id;
  g.base.position = kBaseRadius * d;
  g.base.rot6 = geometry::rot6d_encode(R);
  std::uniform_real_distribution<double> joint(spec.joint_min, spec.joint_max);
  g.joints.resize(spec.dof());
  for (int k = 0; k < spec.dof(); ++k) g.joints(k) = joint(rng);
  return g;
}

}  // namespace graspbridge::pipeline
