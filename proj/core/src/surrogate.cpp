#include "optstudy/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "optstudy/error.hpp"
#include "optstudy/linalg.hpp"

namespace optstudy {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

void check_shapes(const Eigen::MatrixXd& X, const Eigen::VectorXd& Q) {
  require(X.rows() == Q.size(), ErrorCode::PreconditionViolated, "X and Q row counts differ");
  require(X.cols() >= 1, ErrorCode::PreconditionViolated, "X has no columns");
}

} // namespace

LinearSurrogate fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& Q) {
  check_shapes(X, Q);
  const Eigen::Index n = X.rows(), m = X.cols();
  if (n < m + 1)
    fail(ErrorCode::RankDeficient, "OLS needs at least " + std::to_string(m + 1) + " points, got " + std::to_string(n));
  Eigen::MatrixXd d(n, m + 1);
  d.col(0).setOnes();
  d.rightCols(m) = X;
  const Eigen::VectorXd coef = solve_least_squares(d, Q);
  LinearSurrogate out;
  out.intercept = coef(0);
  out.coefficients = coef.tail(m);
  out.n_points = static_cast<std::size_t>(n);
  out.r_squared = r_squared(Q, d * coef);
  return out;
}

QuadraticSurrogate fit_quadratic(const Eigen::MatrixXd& X, const Eigen::VectorXd& Q) {
  check_shapes(X, Q);
  const Eigen::Index n = X.rows(), m = X.cols();
  const auto p = static_cast<Eigen::Index>(quadratic_term_count(static_cast<std::size_t>(m)));
  if (n < p)
    fail(ErrorCode::RankDeficient, "quadratic fit needs at least " + std::to_string(p) + " points, got " + std::to_string(n));
  // fit in u = x - 0.5 for conditioning, then expand back
  const Eigen::MatrixXd u = X.array() - 0.5;
  Eigen::MatrixXd d(n, p);
  d.col(0).setOnes();
  d.middleCols(1, m) = u;
  Eigen::Index col = m + 1;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i; j < m; ++j) d.col(col++) = u.col(i).cwiseProduct(u.col(j));
  const Eigen::VectorXd coef = solve_least_squares(d, Q);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  col = m + 1;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i; j < m; ++j) {
      const double beta = coef(col++);
      if (i == j) a(i, i) = beta;
      else a(i, j) = a(j, i) = beta / 2.0;
    }
  const Eigen::VectorXd bu = coef.segment(1, m);
  const Eigen::VectorXd h = Eigen::VectorXd::Constant(m, 0.5);

  QuadraticSurrogate out;
  out.quadratic = a;
  out.linear = bu - 2.0 * a * h;
  out.intercept = coef(0) - bu.dot(h) + h.dot(a * h);
  out.n_points = static_cast<std::size_t>(n);
  out.r_squared = r_squared(Q, d * coef);
  return out;
}

Poly1DSurrogate fit_poly1d(std::span<const double> x, std::span<const double> Q, int max_degree) {
  require(x.size() == Q.size(), ErrorCode::PreconditionViolated, "x and Q sizes differ");
  require(max_degree >= 1, ErrorCode::PreconditionViolated, "max_degree must be at least 1");
  const std::set<double> distinct(x.begin(), x.end());
  if (distinct.size() < 2)
    fail(ErrorCode::DuplicateAbscissae, "a 1-D fit needs at least two distinct abscissae");

  const auto n = static_cast<Eigen::Index>(x.size());
  const double lo = *distinct.begin();
  const double hi = *distinct.rbegin();
  const double shift = 0.5 * (lo + hi);
  const double scale = 0.5 * (hi - lo);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(Q.data(), n);
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = (x[static_cast<std::size_t>(i)] - shift) / scale;

  const int top = std::min<int>(max_degree, static_cast<int>(distinct.size()) - 1);
  std::vector<Poly1DSurrogate> fits;
  for (int deg = 1; deg <= top; ++deg) {
    Eigen::MatrixXd v(n, deg + 1);
    v.col(0).setOnes();
    for (int k = 1; k <= deg; ++k) v.col(k) = v.col(k - 1).cwiseProduct(s);
    Eigen::VectorXd coef;
    try {
      coef = solve_least_squares(v, y);
    } catch (const StudyError& e) {
      if (e.code() != ErrorCode::RankDeficient || deg == 1) throw;
      continue;
    }
    Poly1DSurrogate p;
    p.degree = deg;
    p.coeffs.assign(coef.data(), coef.data() + coef.size());
    p.shift = shift;
    p.scale = scale;
    p.lower = lo;
    p.upper = hi;
    p.r_squared = r_squared(y, v * coef);
    fits.push_back(std::move(p));
  }

  std::vector<DegreeFit> diag;
  for (const auto& f : fits) {
    const auto dof = static_cast<double>(n) - f.degree - 1.0;
    const double adj = dof > 0.0 ? 1.0 - (1.0 - f.r_squared) * (static_cast<double>(n) - 1.0) / dof
                                 : std::numeric_limits<double>::quiet_NaN();
    diag.push_back({f.degree, f.r_squared, adj});
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& d : diag)
    if (!std::isnan(d.adjusted_r_squared)) best = std::max(best, d.adjusted_r_squared);

  std::size_t pick = 0; // no eligible candidate: lowest degree
  if (std::isfinite(best)) {
    for (std::size_t i = 0; i < diag.size(); ++i)
      if (!std::isnan(diag[i].adjusted_r_squared) && diag[i].adjusted_r_squared >= best - kDegreeSelectionSlack) {
        pick = i;
        break;
      }
  }
  Poly1DSurrogate out = std::move(fits[pick]);
  out.candidates = std::move(diag);
  return out;
}

double predict(const LinearSurrogate& model, const Eigen::VectorXd& x) {
  return model.intercept + model.coefficients.dot(x);
}

double predict(const QuadraticSurrogate& model, const Eigen::VectorXd& x) {
  return model.intercept + model.linear.dot(x) + x.dot(model.quadratic * x);
}

double predict(const Poly1DSurrogate& model, double x) {
  const double s = (x - model.shift) / model.scale;
  double acc = 0.0;
  for (auto it = model.coeffs.rbegin(); it != model.coeffs.rend(); ++it) acc = acc * s + *it;
  return acc;
}

double predict(const Surrogate& model, const Eigen::VectorXd& x) {
  return std::visit(overloaded{
                        [&](const Poly1DSurrogate& p) { return predict(p, x(0)); },
                        [&](const auto& m) { return predict(m, x); },
                    },
                    model);
}

Eigen::VectorXd gradient(const LinearSurrogate& model, const Eigen::VectorXd&) { return model.coefficients; }

Eigen::VectorXd gradient(const QuadraticSurrogate& model, const Eigen::VectorXd& x) {
  return model.linear + 2.0 * model.quadratic * x;
}

double derivative(const Poly1DSurrogate& model, double x) {
  const double s = (x - model.shift) / model.scale;
  double acc = 0.0;
  for (std::size_t k = model.coeffs.size(); k-- > 1;) acc = acc * s + static_cast<double>(k) * model.coeffs[k];
  return acc / model.scale;
}

Eigen::VectorXd gradient(const Surrogate& model, const Eigen::VectorXd& x) {
  return std::visit(overloaded{
                        [&](const Poly1DSurrogate& p) { return Eigen::VectorXd::Constant(1, derivative(p, x(0))).eval(); },
                        [&](const auto& m) { return gradient(m, x); },
                    },
                    model);
}

std::size_t input_dimension(const Surrogate& model) noexcept {
  return std::visit(overloaded{
                        [](const Poly1DSurrogate&) -> std::size_t { return 1; },
                        [](const auto& m) -> std::size_t { return m.dimension(); },
                    },
                    model);
}

bool extrapolates(const Surrogate& model, const Eigen::VectorXd& x) {
  return std::visit(overloaded{
                        [&](const Poly1DSurrogate& p) { return p.extrapolates(x(0)); },
                        [&](const auto&) { return (x.array() < 0.0).any() || (x.array() > 1.0).any(); },
                    },
                    model);
}

} // namespace optstudy
