#pragma once

#include <Eigen/Dense>

namespace optstudy {

inline constexpr double kMaxConditionNumber = 1e12;

// Least squares min ||D c - y|| through the normal equations, factored with
// Cholesky after column equilibration. Throws RankDeficient when the
// equilibrated Gram matrix has condition number above kMaxConditionNumber
// or a zero column.
Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& design,
                                    const Eigen::VectorXd& rhs);

// Spectral condition number of a symmetric positive semidefinite matrix
// (infinity when singular).
double spd_condition_number(const Eigen::MatrixXd& gram);

// Coefficient of determination clamped to [0, 1]. Exactly 1 only when the
// residual norm is at most 1e-12 * ||y||.
double r_squared(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted);

} // namespace optstudy
