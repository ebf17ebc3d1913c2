#include "graspbridge/costs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "graspbridge/error.hpp"
#include "graspbridge/parallel.hpp"

namespace graspbridge::costs {
namespace {

constexpr double kPenaltyQuantile = 0.99;

const geometry::ContactMap& need_contact(const GraspAnnotation& g) {
  if (!g.contact) throw Error(ErrorCode::kAnnotation, "grasp has no contact map");
  return *g.contact;
}

const wrench::WrenchHull& need_wrenches(const GraspAnnotation& g) {
  if (!g.wrenches) throw Error(ErrorCode::kAnnotation, "grasp has no wrench hull");
  return *g.wrenches;
}

const Vector6d& need_manip(const GraspAnnotation& g) {
  if (!g.manip) throw Error(ErrorCode::kAnnotation, "grasp has no max-effect vector");
  return *g.manip;
}

}  // namespace

std::string_view to_string(CostKind kind) {
  switch (kind) {
    case CostKind::kPose: return "pose";
    case CostKind::kContact: return "contact";
    case CostKind::kWrench: return "wrench";
    case CostKind::kJacobian: return "jacobian";
  }
  return "pose";
}

CostKind parse_cost_kind(std::string_view name) {
  if (name == "pose") return CostKind::kPose;
  if (name == "contact") return CostKind::kContact;
  if (name == "wrench") return CostKind::kWrench;
  if (name == "jacobian") return CostKind::kJacobian;
  throw Error(ErrorCode::kInvalidInput, "unknown cost kind '" + std::string(name) + "'");
}

double d_pose(const geometry::GraspConfig& a, const geometry::GraspConfig& b) {
  geometry::Mat3 ra = geometry::rot6d_decode(a.base.rot6);
  geometry::Mat3 rb = geometry::rot6d_decode(b.base.rot6);
  return (a.base.position - b.base.position).squaredNorm() + (ra - rb).squaredNorm();
}

double d_contact(const geometry::ContactMap& a, const geometry::ContactMap& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kEmptyInput, "contact cost of an empty map");
  return geometry::chamfer(a.cloud, b.cloud);
}

double d_wrench(const wrench::WrenchHull& a, const wrench::WrenchHull& b, std::size_t n_samples,
                std::uint64_t seed, bool* degenerate) {
  if (degenerate != nullptr) *degenerate = false;
  try {
    if (a.size() == 0 || b.size() == 0) throw Error(ErrorCode::kDegenerateHull, "empty hull");
    return 1.0 - wrench::mc_hull_iou(a, b, n_samples, seed);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateHull) throw;
    if (degenerate != nullptr) *degenerate = true;
    return 1.0;
  }
}

Vector6d max_effect(const Eigen::MatrixXd& J) {
  if (J.rows() != 6 || J.cols() < 1) {
    throw Error(ErrorCode::kShape, "Jacobian must be 6 x n with n >= 1, got " + std::to_string(J.rows()) +
                                       " x " + std::to_string(J.cols()));
  }
  return J.cwiseAbs().rowwise().maxCoeff();
}

double d_jac(const Vector6d& a, const Vector6d& b) { return (a - b).squaredNorm(); }

Eigen::MatrixXd sq_euclidean_cost(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) throw Error(ErrorCode::kShape, "point sets have different dimensions");
  Eigen::MatrixXd C(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) C(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  }
  return C;
}

Eigen::MatrixXd cost_matrix(const std::vector<GraspAnnotation>& batch_a,
                            const std::vector<GraspAnnotation>& batch_b, const CostParams& params,
                            CostMatrixStats* stats) {
  if (batch_a.empty() || batch_b.empty()) throw Error(ErrorCode::kEmptyInput, "cost matrix of an empty batch");
  const auto rows = static_cast<Eigen::Index>(batch_a.size());
  const auto cols = static_cast<Eigen::Index>(batch_b.size());
  Eigen::MatrixXd C(rows, cols);
  CostMatrixStats local;

  switch (params.kind) {
    case CostKind::kPose:
      parallel_for(batch_a.size(), [&](std::size_t i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
          C(static_cast<Eigen::Index>(i), j) = d_pose(batch_a[i].config, batch_b[j].config);
        }
      });
      break;
    case CostKind::kJacobian:
      for (Eigen::Index i = 0; i < rows; ++i) {
        const Vector6d& ma = need_manip(batch_a[i]);
        for (Eigen::Index j = 0; j < cols; ++j) C(i, j) = d_jac(ma, need_manip(batch_b[j]));
      }
      break;
    case CostKind::kContact: {
      for (const auto& g : batch_a) need_contact(g);
      for (const auto& g : batch_b) need_contact(g);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      parallel_for(batch_a.size(), [&](std::size_t i) {
        const auto& ca = *batch_a[i].contact;
        for (Eigen::Index j = 0; j < cols; ++j) {
          const auto& cb = *batch_b[j].contact;
          C(static_cast<Eigen::Index>(i), j) = (ca.empty() || cb.empty()) ? nan : d_contact(ca, cb);
        }
      });
      std::vector<double> finite;
      finite.reserve(static_cast<std::size_t>(C.size()));
      for (Eigen::Index k = 0; k < C.size(); ++k) {
        if (std::isfinite(C.data()[k])) finite.push_back(C.data()[k]);
      }
      if (finite.size() < static_cast<std::size_t>(C.size())) {
        double penalty = 1.0;
        if (!finite.empty()) {
          std::sort(finite.begin(), finite.end());
          auto rank = static_cast<std::size_t>(std::ceil(kPenaltyQuantile * static_cast<double>(finite.size())));
          penalty = finite[std::max<std::size_t>(rank, 1) - 1];
        }
        local.penalty = penalty;
        for (Eigen::Index k = 0; k < C.size(); ++k) {
          if (!std::isfinite(C.data()[k])) {
            C.data()[k] = penalty;
            ++local.penalized;
          }
        }
      }
      break;
    }
    case CostKind::kWrench: {
      std::vector<wrench::WrenchHull> ha, hb;
      ha.reserve(batch_a.size());
      hb.reserve(batch_b.size());
      for (const auto& g : batch_a) {
        ha.push_back(need_wrenches(g));
        ha.back().dims = params.wrench_dims;
      }
      for (const auto& g : batch_b) {
        hb.push_back(need_wrenches(g));
        hb.back().dims = params.wrench_dims;
      }
      std::vector<unsigned char> degenerate(static_cast<std::size_t>(rows * cols), 0);
      parallel_for(batch_a.size(), [&](std::size_t i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
          bool deg = false;
          C(static_cast<Eigen::Index>(i), j) = d_wrench(ha[i], hb[j], params.iou_samples, params.seed, &deg);
          degenerate[i * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)] = deg ? 1 : 0;
        }
      });
      for (unsigned char d : degenerate) local.degenerate += d;
      break;
    }
  }
  if (stats != nullptr) *stats = local;
  return C;
}

}  // namespace graspbridge::costs
