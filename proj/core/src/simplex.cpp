#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "graspbridge/error.hpp"

namespace graspbridge::detail {

double phase_one_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::Index m = A.rows();
  const Eigen::Index k = A.cols();
  const Eigen::Index n = k + m;

  // Columns [0, k) are lambda, [k, n) artificials, column n the right-hand side.
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, n + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    double sign = b(i) < 0.0 ? -1.0 : 1.0;
    T.row(i).head(k) = sign * A.row(i);
    T(i, k + i) = 1.0;
    T(i, n) = sign * b(i);
  }
  std::vector<Eigen::Index> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = k + i;

  // Reduced costs for minimizing the sum of artificials.
  Eigen::VectorXd reduced = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < k; ++j) reduced(j) = -T.col(j).sum();

  const double scale = std::max(1.0, T.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * scale;
  const int max_pivots = static_cast<int>(50 * (n + 1));

  for (int iter = 0; iter < max_pivots; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (reduced(j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    Eigen::Index leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      double a = T(i, enter);
      if (a <= eps) continue;
      double ratio = T(i, n) / a;
      if (ratio < best_ratio - eps || (std::abs(ratio - best_ratio) <= eps && leave >= 0 &&
                                       basis[i] < basis[leave])) {
        best_ratio = ratio;
        leave = i;
      }
    }
    // Unbounded is impossible for a phase-one problem bounded below by zero.
    if (leave < 0) break;

    T.row(leave) /= T(leave, enter);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == leave) continue;
      double f = T(i, enter);
      if (f != 0.0) T.row(i) -= f * T.row(leave);
    }
    double f = reduced(enter);
    reduced -= f * T.row(leave).head(n).transpose();
    basis[leave] = enter;
  }

  double residual = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] >= k) residual += std::max(0.0, T(i, n));
  }
  return residual;
}

}  // namespace graspbridge::detail
