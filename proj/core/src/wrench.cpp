#include "graspbridge/wrench.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "graspbridge/error.hpp"
#include "graspbridge/parallel.hpp"
#include "graspbridge/random.hpp"
#include "simplex.hpp"

namespace graspbridge::wrench {
namespace {

constexpr std::size_t kChunk = 8192;

bool in_box(const Eigen::Ref<const Eigen::VectorXd>& q, const Eigen::VectorXd& lo,
            const Eigen::VectorXd& hi, double tol) {
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q(i) < lo(i) - tol || q(i) > hi(i) + tol) return false;
  }
  return true;
}

// All supporting planes through three vertices. O(k^4), fine for the
// contact-sized vertex sets seen here.
void enumerate_facets_3d(const Eigen::MatrixXd& v, Eigen::MatrixXd& normals,
                         Eigen::VectorXd& offsets) {
  const Eigen::Index k = v.rows();
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  const double side_tol = 1e-10 * scale;
  std::vector<Eigen::Vector3d> ns;
  std::vector<double> ds;
  auto seen = [&](const Eigen::Vector3d& n, double d) {
    for (std::size_t i = 0; i < ns.size(); ++i) {
      if ((ns[i] - n).cwiseAbs().maxCoeff() < 1e-12 && std::abs(ds[i] - d) < 1e-12 * scale) {
        return true;
      }
    }
    return false;
  };
  for (Eigen::Index i = 0; i < k; ++i) {
    Eigen::Vector3d pi = v.row(i).transpose();
    for (Eigen::Index j = i + 1; j < k; ++j) {
      Eigen::Vector3d pj = v.row(j).transpose();
      for (Eigen::Index l = j + 1; l < k; ++l) {
        Eigen::Vector3d pl = v.row(l).transpose();
        Eigen::Vector3d n = (pj - pi).cross(pl - pi);
        double len = n.norm();
        if (len <= 1e-12 * scale * scale) continue;
        n /= len;
        double d = n.dot(pi);
        bool below = true;
        bool above = true;
        for (Eigen::Index r = 0; r < k && (below || above); ++r) {
          double s = n.dot(v.row(r).transpose()) - d;
          if (s > side_tol) below = false;
          if (s < -side_tol) above = false;
        }
        if (below && !above && !seen(n, d)) {
          ns.push_back(n);
          ds.push_back(d);
        } else if (above && !below && !seen(-n, -d)) {
          ns.push_back(-n);
          ds.push_back(-d);
        }
      }
    }
  }
  normals.resize(static_cast<Eigen::Index>(ns.size()), 3);
  offsets.resize(static_cast<Eigen::Index>(ns.size()));
  for (std::size_t i = 0; i < ns.size(); ++i) {
    normals.row(static_cast<Eigen::Index>(i)) = ns[i].transpose();
    offsets(static_cast<Eigen::Index>(i)) = ds[i];
  }
}

}  // namespace

WrenchHull build_wrenches(std::span<const ContactPoint> contacts) {
  if (contacts.empty()) throw Error(ErrorCode::kEmptyInput, "no contacts to build wrenches from");
  WrenchHull hull;
  hull.dims = 6;
  hull.vertices.resize(static_cast<Eigen::Index>(contacts.size()), 6);
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    const ContactPoint& cp = contacts[i];
    if (!(cp.alpha > 0.0)) throw Error(ErrorCode::kInvalidInput, "contact force scale must be positive");
    Vec3 f = cp.alpha * cp.n;
    Wrench w;
    w << f, cp.c.cross(f);
    hull.vertices.row(static_cast<Eigen::Index>(i)) = w.transpose();
  }
  return hull;
}

std::vector<ContactPoint> inward_contacts(const geometry::ContactMap& map, double alpha) {
  std::vector<ContactPoint> out;
  out.reserve(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    out.push_back({map.cloud.points[i], -map.normals[i], alpha});
  }
  return out;
}

WrenchHull reduce_to_forces(const WrenchHull& hull) {
  WrenchHull out = hull;
  out.dims = 3;
  return out;
}

bool is_flat(const Eigen::MatrixXd& vertices) {
  const Eigen::Index d = vertices.cols();
  if (vertices.rows() < d + 1) return true;
  Eigen::MatrixXd centered = vertices.rowwise() - vertices.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  return svd.singularValues()(d - 1) < kFlatTol;
}

bool hull_membership(const Eigen::MatrixXd& vertices, const Eigen::VectorXd& query, double tol) {
  if (vertices.cols() != 3 && vertices.cols() != 6) {
    throw Error(ErrorCode::kShape, "hull dimension must be 3 or 6, got " + std::to_string(vertices.cols()));
  }
  return HullOracle(vertices, tol).contains_lp(query);
}

HullOracle::HullOracle(Eigen::MatrixXd vertices, double tol) : vertices_(std::move(vertices)), tol_(tol) {
  if (vertices_.rows() < 1) throw Error(ErrorCode::kEmptyInput, "hull needs at least one vertex");
  if (vertices_.cols() < 1) throw Error(ErrorCode::kShape, "hull vertices have no coordinates");
  if (!vertices_.allFinite()) throw Error(ErrorCode::kInvalidInput, "non-finite hull vertex");
  lo_ = vertices_.colwise().minCoeff().transpose();
  hi_ = vertices_.colwise().maxCoeff().transpose();
  if (vertices_.cols() == 3 && !is_flat(vertices_)) {
    enumerate_facets_3d(vertices_, normals_, offsets_);
    use_facets_ = normals_.rows() >= 4;
  }
}

bool HullOracle::contains_lp(const Eigen::Ref<const Eigen::VectorXd>& q) const {
  if (q.size() != vertices_.cols()) {
    throw Error(ErrorCode::kShape, "query has dimension " + std::to_string(q.size()) + ", hull " +
                                       std::to_string(vertices_.cols()));
  }
  if (!in_box(q, lo_, hi_, tol_)) return false;
  const Eigen::Index d = vertices_.cols();
  Eigen::MatrixXd A(d + 1, vertices_.rows());
  A.topRows(d) = vertices_.transpose();
  A.row(d).setOnes();
  Eigen::VectorXd b(d + 1);
  b.head(d) = q;
  b(d) = 1.0;
  return detail::phase_one_residual(A, b) <= tol_;
}

bool HullOracle::contains(const Eigen::Ref<const Eigen::VectorXd>& q) const {
  if (!use_facets_) return contains_lp(q);
  if (q.size() != 3) throw Error(ErrorCode::kShape, "query dimension does not match 3-D hull");
  if (!in_box(q, lo_, hi_, tol_)) return false;
  for (Eigen::Index f = 0; f < normals_.rows(); ++f) {
    if (normals_(f, 0) * q(0) + normals_(f, 1) * q(1) + normals_(f, 2) * q(2) > offsets_(f) + tol_) {
      return false;
    }
  }
  return true;
}

IouEstimate mc_hull_iou_detail(const WrenchHull& a, const WrenchHull& b, std::size_t n_samples,
                               std::uint64_t seed) {
  if (a.dims != b.dims) throw Error(ErrorCode::kShape, "hulls have different active dimensions");
  if (a.size() == 0 || b.size() == 0) throw Error(ErrorCode::kEmptyInput, "hull without vertices");
  if (n_samples < 1) throw Error(ErrorCode::kInvalidInput, "need at least one Monte-Carlo sample");

  const Eigen::MatrixXd va = a.active();
  const Eigen::MatrixXd vb = b.active();
  Eigen::VectorXd lo = va.colwise().minCoeff().cwiseMin(vb.colwise().minCoeff()).transpose();
  Eigen::VectorXd hi = va.colwise().maxCoeff().cwiseMax(vb.colwise().maxCoeff()).transpose();

  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (hi(i) - lo(i) > kFlatTol) keep.push_back(i);
  }
  const auto r = static_cast<Eigen::Index>(keep.size());
  if (r == 0) throw Error(ErrorCode::kDegenerateHull, "all hull vertices coincide");

  auto project = [&](const Eigen::MatrixXd& v) {
    Eigen::MatrixXd out(v.rows(), r);
    for (Eigen::Index j = 0; j < r; ++j) out.col(j) = v.col(keep[static_cast<std::size_t>(j)]);
    return out;
  };
  Eigen::MatrixXd pa = project(va);
  Eigen::MatrixXd pb = project(vb);
  if (is_flat(pa) || is_flat(pb)) throw Error(ErrorCode::kDegenerateHull, "hull has zero volume");

  const HullOracle oa(pa);
  const bool same = pa.rows() == pb.rows() && pa == pb;
  const HullOracle ob(same ? pa : pb);

  Eigen::VectorXd plo(r), pext(r);
  for (Eigen::Index j = 0; j < r; ++j) {
    plo(j) = lo(keep[static_cast<std::size_t>(j)]);
    pext(j) = hi(keep[static_cast<std::size_t>(j)]) - plo(j);
  }

  const std::size_t chunks = (n_samples + kChunk - 1) / kChunk;
  std::vector<std::size_t> both(chunks, 0), either(chunks, 0);
  parallel_for(chunks, [&](std::size_t c) {
    Rng rng = make_rng(seed, c);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(n_samples, begin + kChunk);
    Eigen::VectorXd q(r);
    std::size_t nb = 0, ne = 0;
    for (std::size_t s = begin; s < end; ++s) {
      for (Eigen::Index j = 0; j < r; ++j) q(j) = plo(j) + pext(j) * unit(rng);
      bool in_a = oa.contains(q);
      bool in_b = same ? in_a : ob.contains(q);
      nb += (in_a && in_b) ? 1 : 0;
      ne += (in_a || in_b) ? 1 : 0;
    }
    both[c] = nb;
    either[c] = ne;
  });

  IouEstimate est;
  est.samples = n_samples;
  est.effective_dims = static_cast<int>(r);
  for (std::size_t c = 0; c < chunks; ++c) {
    est.in_both += both[c];
    est.in_either += either[c];
  }
  // Identical vertex sets score 1 even when no sample lands inside.
  if (same) {
    est.iou = 1.0;
  } else {
    est.iou = est.in_either == 0 ? 0.0
                                 : static_cast<double>(est.in_both) / static_cast<double>(est.in_either);
  }
  return est;
}

double mc_hull_iou(const WrenchHull& a, const WrenchHull& b, std::size_t n_samples, std::uint64_t seed) {
  return mc_hull_iou_detail(a, b, n_samples, seed).iou;
}

}  // namespace graspbridge::wrench
