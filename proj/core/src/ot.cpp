#include "graspbridge/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "graspbridge/error.hpp"
#include "graspbridge/random.hpp"

namespace graspbridge::ot {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_marginal(const Eigen::VectorXd& m, Eigen::Index n, const char* name) {
  if (m.size() != n) {
    throw Error(ErrorCode::kShape, std::string(name) + " marginal has length " + std::to_string(m.size()) +
                                       ", expected " + std::to_string(n));
  }
  if (!m.allFinite() || (m.array() <= 0.0).any()) {
    throw Error(ErrorCode::kInvalidInput, std::string(name) + " marginal must be strictly positive");
  }
  if (std::abs(m.sum() - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidInput, std::string(name) + " marginal must sum to 1");
  }
}

// out_i = eps * log(m_i) - eps * LSE_j((pot_j - K_ij) / eps), K row-major.
void soft_update(const RowMatrix& K, const Eigen::VectorXd& pot, const Eigen::VectorXd& log_m,
                 double eps, Eigen::VectorXd& out) {
  const Eigen::Index rows = K.rows();
  const Eigen::Index cols = K.cols();
  const double inv = 1.0 / eps;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double* k = K.data() + i * cols;
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < cols; ++j) mx = std::max(mx, (pot(j) - k[j]) * inv);
    double s = 0.0;
    for (Eigen::Index j = 0; j < cols; ++j) s += std::exp((pot(j) - k[j]) * inv - mx);
    out(i) = eps * (log_m(i) - mx - std::log(s));
  }
}

}  // namespace

Eigen::VectorXd uniform_marginal(Eigen::Index n) {
  return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
}

double default_eps(const Eigen::MatrixXd& C, double scale) {
  std::vector<double> pos;
  pos.reserve(static_cast<std::size_t>(C.size()));
  for (Eigen::Index k = 0; k < C.size(); ++k) {
    if (C.data()[k] > 0.0) pos.push_back(C.data()[k]);
  }
  if (pos.empty()) return scale;
  auto mid = pos.begin() + static_cast<std::ptrdiff_t>(pos.size() / 2);
  std::nth_element(pos.begin(), mid, pos.end());
  double median = *mid;
  if (pos.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(pos.begin(), mid));
  }
  return scale * median;
}

TransportPlan sinkhorn(const Eigen::MatrixXd& C, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       double eps, const SinkhornOptions& options) {
  if (C.rows() == 0 || C.cols() == 0) throw Error(ErrorCode::kEmptyInput, "empty cost matrix");
  if (!C.allFinite()) throw Error(ErrorCode::kInvalidInput, "cost matrix has non-finite entries");
  if ((C.array() < 0.0).any()) throw Error(ErrorCode::kInvalidInput, "cost matrix has negative entries");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorCode::kInvalidInput, "eps must be positive");
  check_marginal(a, C.rows(), "row");
  check_marginal(b, C.cols(), "column");

  const RowMatrix K = C;
  const RowMatrix Kt = C.transpose();
  const Eigen::VectorXd log_a = a.array().log();
  const Eigen::VectorXd log_b = b.array().log();

  Eigen::VectorXd f = Eigen::VectorXd::Zero(C.rows());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(C.cols());
  Eigen::VectorXd f_next(C.rows());

  TransportPlan plan;
  plan.eps = eps;
  int it = 0;
  for (; it < options.max_iter; ++it) {
    soft_update(K, g, log_a, eps, f_next);
    if (it > 0) {
      // Row sums of the plan (f, g) equal a_i * exp((f_i - f_next_i) / eps).
      double row_err = 0.0;
      for (Eigen::Index i = 0; i < f.size(); ++i) {
        row_err = std::max(row_err, a(i) * std::abs(std::expm1((f(i) - f_next(i)) / eps)));
      }
      if (row_err < options.tol) {
        plan.converged = true;
        break;
      }
    }
    f = f_next;
    soft_update(Kt, f, log_b, eps, g);
  }
  plan.iterations_used = it;

  plan.pi.resize(C.rows(), C.cols());
  for (Eigen::Index j = 0; j < C.cols(); ++j) {
    for (Eigen::Index i = 0; i < C.rows(); ++i) plan.pi(i, j) = std::exp((f(i) + g(j) - C(i, j)) / eps);
  }
  if (!plan.pi.allFinite()) throw Error(ErrorCode::kNumeric, "Sinkhorn produced a non-finite plan");
  plan.a = a;
  plan.b = b;
  double row_err = (plan.pi.rowwise().sum() - a).cwiseAbs().maxCoeff();
  double col_err = (plan.pi.colwise().sum().transpose() - b).cwiseAbs().maxCoeff();
  plan.marginal_error = std::max(row_err, col_err);
  plan.converged = plan.converged && plan.marginal_error < options.tol;
  return plan;
}

double transport_cost(const TransportPlan& plan, const Eigen::MatrixXd& C) {
  if (plan.pi.rows() != C.rows() || plan.pi.cols() != C.cols()) {
    throw Error(ErrorCode::kShape, "plan and cost matrix shapes differ");
  }
  return plan.pi.cwiseProduct(C).sum();
}

std::vector<IndexPair> sample_pairs(const TransportPlan& plan, std::size_t n, std::uint64_t seed) {
  const Eigen::Index rows = plan.pi.rows();
  const Eigen::Index cols = plan.pi.cols();
  std::vector<double> cumulative(static_cast<std::size_t>(rows * cols));
  double total = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      double p = plan.pi(i, j);
      if (!(p >= 0.0) || !std::isfinite(p)) throw Error(ErrorCode::kDegeneratePlan, "plan has invalid entries");
      total += p;
      cumulative[static_cast<std::size_t>(i * cols + j)] = total;
    }
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kDegeneratePlan, "plan has no mass");

  std::vector<IndexPair> out;
  out.reserve(n);
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t s = 0; s < n; ++s) {
    double u = unit(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) {
      // u rounded up to total: take the last cell that carries mass.
      --it;
      while (it != cumulative.begin() && *(it - 1) == *it) --it;
    }
    auto flat = static_cast<Eigen::Index>(it - cumulative.begin());
    out.emplace_back(flat / cols, flat % cols);
  }
  return out;
}

}  // namespace graspbridge::ot
