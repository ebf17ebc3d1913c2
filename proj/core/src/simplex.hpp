#pragma once

#include <Eigen/Core>

namespace graspbridge::detail {

/// Phase-one simplex for {lambda >= 0 : A lambda = b}. Returns the minimum of
/// sum |A lambda - b| over lambda >= 0, so zero means feasible. Dense tableau
/// with Bland's rule; intended for a handful of rows and <= a few hundred
/// columns.
double phase_one_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace graspbridge::detail
