#include "optstudy/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "optstudy/error.hpp"

namespace optstudy {

Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& rhs) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  require(rhs.size() == n, ErrorCode::PreconditionViolated, "least squares: row count mismatch");
  require(p >= 1, ErrorCode::PreconditionViolated, "least squares: empty design");
  if (n < p)
    fail(ErrorCode::RankDeficient, std::to_string(n) + " rows cannot determine " + std::to_string(p) + " coefficients");

  Eigen::VectorXd norms = design.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < p; ++j)
    if (!(norms(j) > 0.0) || !std::isfinite(norms(j)))
      fail(ErrorCode::RankDeficient, "design column " + std::to_string(j) + " is zero or non-finite");

  const Eigen::MatrixXd scaled = design * norms.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd gram = scaled.transpose() * scaled;
  const double cond = spd_condition_number(gram);
  if (!(cond <= kMaxConditionNumber))
    fail(ErrorCode::RankDeficient, "normal equations are ill-conditioned (condition number " +
                                       (std::isfinite(cond) ? std::to_string(cond) : std::string("inf")) + ")");

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) fail(ErrorCode::RankDeficient, "normal equations are not positive definite");
  const Eigen::VectorXd c = llt.solve(scaled.transpose() * rhs);
  return c.cwiseQuotient(norms);
}

double spd_condition_number(const Eigen::MatrixXd& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

double r_squared(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted) {
  const Eigen::VectorXd resid = y - fitted;
  const double rnorm = resid.norm();
  if (rnorm <= 1e-12 * y.norm()) return 1.0;
  const double ss_tot = (y.array() - y.mean()).square().sum();
  if (!(ss_tot > 0.0)) return 0.0;
  const double r2 = 1.0 - rnorm * rnorm / ss_tot;
  return std::clamp(r2, 0.0, std::nextafter(1.0, 0.0));
}

} // namespace optstudy
