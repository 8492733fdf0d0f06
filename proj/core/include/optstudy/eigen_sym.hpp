#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace optstudy {

struct SymmetricEigen {
  Eigen::VectorXd values;  // descending
  Eigen::MatrixXd vectors; // column k pairs with values[k]
  std::size_t sweeps = 0;
  double off_diagonal_norm = 0.0;
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is at most
// 1e-12 * max(1, ||C||_F). Input must be symmetric; only the upper
// triangle is trusted. Throws EigenNoConvergence after `max_sweeps`.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& symmetric, std::size_t max_sweeps = 64);

// Flips v so its largest-magnitude entry (first on ties) is nonnegative.
void apply_sign_convention(Eigen::Ref<Eigen::VectorXd> v);

} // namespace optstudy
