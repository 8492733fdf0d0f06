#include "optstudy/active_subspace.hpp"

#include <cmath>

#include "optstudy/eigen_sym.hpp"
#include "optstudy/error.hpp"

namespace optstudy {

std::string_view to_string(DirectionSource source) noexcept {
  return source == DirectionSource::quadratic ? "quadratic" : "ols_rank1";
}

namespace {

std::vector<std::string> default_names(std::vector<std::string> names, std::size_t m) {
  if (names.empty())
    for (std::size_t i = 0; i < m; ++i) names.push_back("x" + std::to_string(i + 1));
  require(names.size() == m, ErrorCode::PreconditionViolated, "parameter name count does not match dimension");
  return names;
}

} // namespace

ASResult active_direction_ols(const LinearSurrogate& model, std::vector<std::string> names) {
  const Eigen::VectorXd& b = model.coefficients;
  const Eigen::Index m = b.size();
  require(m >= 1, ErrorCode::PreconditionViolated, "empty coefficient vector");
  const double norm = b.norm();
  if (!(norm > 1e-14)) fail(ErrorCode::ZeroGradient, "fitted linear model has zero gradient; no active direction");

  ASResult out;
  out.param_names = default_names(std::move(names), static_cast<std::size_t>(m));
  out.source = DirectionSource::ols_rank1;
  out.direction = b / norm;
  apply_sign_convention(out.direction);
  out.covariance = b * b.transpose();
  out.eigenvalues = Eigen::VectorXd::Zero(m);
  out.eigenvalues(0) = b.squaredNorm();

  // Householder reflector taking e1 to the direction completes the basis.
  // v = e1 - w when w(0) <= 0 (H e1 = w), else v = e1 + w (H e1 = -w).
  const Eigen::VectorXd& w = out.direction;
  const bool flip = w(0) > 0.0;
  Eigen::VectorXd v = flip ? w.eval() : (-w).eval();
  v(0) += 1.0;
  const double vv = v.squaredNorm();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(m, m);
  if (vv > 0.0) h -= (2.0 / vv) * v * v.transpose();
  h.col(0) = w;
  out.eigenvectors = h;
  if (m > 1) out.split = 1;
  return out;
}

ASResult active_subspace_quadratic(const QuadraticSurrogate& model, const Eigen::MatrixXd& X,
                                   std::vector<std::string> names) {
  const Eigen::Index m = model.linear.size();
  require(X.cols() == m, ErrorCode::PreconditionViolated, "X dimension does not match the model");
  require(X.rows() >= 1, ErrorCode::PreconditionViolated, "no sample points");

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index j = 0; j < X.rows(); ++j) {
    const Eigen::VectorXd g = gradient(model, X.row(j).transpose());
    c.noalias() += g * g.transpose();
  }
  c /= static_cast<double>(X.rows());
  const double cnorm = c.norm();
  if (!(cnorm > 1e-28)) fail(ErrorCode::ZeroGradient, "fitted quadratic model has zero gradient at every sample");

  auto eig = jacobi_eigen(c);
  const double floor = 1e-12 * std::max(1.0, cnorm);
  for (Eigen::Index k = 0; k < m; ++k)
    if (eig.values(k) < 0.0 && eig.values(k) >= -floor) eig.values(k) = 0.0;

  ASResult out;
  out.param_names = default_names(std::move(names), static_cast<std::size_t>(m));
  out.source = DirectionSource::quadratic;
  out.covariance = c;
  out.eigenvalues = eig.values;
  out.eigenvectors = eig.vectors;
  out.direction = eig.vectors.col(0);
  out.split = eigen_gap(std::span<const double>(eig.values.data(), static_cast<std::size_t>(m)));
  return out;
}

std::optional<std::size_t> eigen_gap(std::span<const double> eigenvalues) {
  std::optional<std::size_t> best;
  double best_ratio = kEigenGapRatio;
  for (std::size_t n = 0; n + 1 < eigenvalues.size(); ++n) {
    const double ratio = eigenvalues[n] / (std::max(eigenvalues[n + 1], 0.0) + 1e-300);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = n + 1;
    }
  }
  return best;
}

ReducedModel build_reduced_model(const Eigen::MatrixXd& X, const Eigen::VectorXd& Q,
                                 const Eigen::VectorXd& direction) {
  require(X.cols() == direction.size() && X.rows() == Q.size(), ErrorCode::PreconditionViolated,
          "reduced model: inconsistent shapes");
  ReducedModel out;
  out.z_values = X * direction;
  out.g = fit_poly1d(std::span<const double>(out.z_values.data(), static_cast<std::size_t>(out.z_values.size())),
                     std::span<const double>(Q.data(), static_cast<std::size_t>(Q.size())));
  out.r_squared = out.g.r_squared;
  return out;
}

SummaryPlotData summary_data(const Eigen::MatrixXd& X, const Eigen::VectorXd& Q,
                             const Eigen::VectorXd& direction, const Poly1DSurrogate& g,
                             std::span<const std::string> names) {
  require(X.cols() == direction.size() && X.rows() == Q.size(), ErrorCode::PreconditionViolated,
          "summary data: inconsistent shapes");
  require(names.empty() || names.size() == static_cast<std::size_t>(direction.size()),
          ErrorCode::PreconditionViolated, "summary data: name count mismatch");
  SummaryPlotData out;
  const Eigen::VectorXd z = X * direction;
  for (Eigen::Index j = 0; j < z.size(); ++j) out.points.emplace_back(z(j), Q(j));
  const std::size_t k = kSummaryCurvePoints;
  for (std::size_t i = 0; i < k; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(k - 1);
    const double zz = i + 1 == k ? g.upper : g.lower + t * (g.upper - g.lower);
    out.curve.emplace_back(zz, predict(g, zz));
  }
  for (Eigen::Index i = 0; i < direction.size(); ++i)
    out.component_bars.emplace_back(names.empty() ? "x" + std::to_string(i + 1) : names[static_cast<std::size_t>(i)],
                                    direction(i));
  return out;
}

} // namespace optstudy
