#include "optstudy/eigen_sym.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "optstudy/error.hpp"

namespace optstudy {

namespace {

double off_norm(const Eigen::MatrixXd& a) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

} // namespace

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& symmetric, std::size_t max_sweeps) {
  require(symmetric.rows() == symmetric.cols(), ErrorCode::PreconditionViolated, "eigen: matrix is not square");
  const Eigen::Index n = symmetric.rows();
  Eigen::MatrixXd a = symmetric.selfadjointView<Eigen::Upper>();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double tol = 1e-12 * std::max(1.0, a.norm());

  SymmetricEigen out;
  double off = off_norm(a);
  while (off > tol) {
    if (out.sweeps >= max_sweeps)
      fail(ErrorCode::EigenNoConvergence, "Jacobi iteration did not converge in " + std::to_string(max_sweeps) + " sweeps");
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // classic symmetric Schur 2x2
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    ++out.sweeps;
    off = off_norm(a);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src);
    out.vectors.col(k) = v.col(src);
    apply_sign_convention(out.vectors.col(k));
  }
  out.off_diagonal_norm = off;
  return out;
}

void apply_sign_convention(Eigen::Ref<Eigen::VectorXd> v) {
  if (v.size() == 0) return;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  if (v(best) < 0.0) v = -v;
}

} // namespace optstudy
