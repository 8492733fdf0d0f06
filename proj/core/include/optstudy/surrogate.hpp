#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace optstudy {

// Q ~ intercept + x^T coefficients over normalized x.
struct LinearSurrogate {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;
  double r_squared = 0.0;
  std::size_t n_points = 0;

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(coefficients.size()); }
};

// Q ~ c + b^T x + x^T A x, A symmetric. Gradient b + 2 A x.
struct QuadraticSurrogate {
  double intercept = 0.0;
  Eigen::VectorXd linear;
  Eigen::MatrixXd quadratic;
  double r_squared = 0.0;
  std::size_t n_points = 0;

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(linear.size()); }
};

struct DegreeFit {
  int degree = 0;
  double r_squared = 0.0;
  double adjusted_r_squared = 0.0; // NaN when N - degree - 1 <= 0
};

// p(x) = sum_k coeffs[k] * ((x - shift) / scale)^k over domain [lower, upper].
struct Poly1DSurrogate {
  int degree = 1;
  std::vector<double> coeffs;
  double shift = 0.0;
  double scale = 1.0;
  double lower = 0.0;
  double upper = 1.0;
  double r_squared = 0.0;
  std::vector<DegreeFit> candidates;

  bool extrapolates(double x) const noexcept { return x < lower || x > upper; }
};

using Surrogate = std::variant<LinearSurrogate, QuadraticSurrogate, Poly1DSurrogate>;

// Requires N >= m + 1 and a well-conditioned design; throws RankDeficient.
LinearSurrogate fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& Q);

inline std::size_t quadratic_term_count(std::size_t m) noexcept { return (m + 1) * (m + 2) / 2; }

// Requires N >= (m + 1)(m + 2) / 2; throws RankDeficient.
QuadraticSurrogate fit_quadratic(const Eigen::MatrixXd& X, const Eigen::VectorXd& Q);

// Fits degrees 1..min(max_degree, N - 1) and keeps the smallest degree whose
// adjusted R^2 is within 0.01 of the best. Throws DuplicateAbscissae when
// fewer than two distinct abscissae are given.
Poly1DSurrogate fit_poly1d(std::span<const double> x, std::span<const double> Q,
                           int max_degree = 3);

inline constexpr double kDegreeSelectionSlack = 0.01;

double predict(const LinearSurrogate& model, const Eigen::VectorXd& x);
double predict(const QuadraticSurrogate& model, const Eigen::VectorXd& x);
double predict(const Poly1DSurrogate& model, double x);
double predict(const Surrogate& model, const Eigen::VectorXd& x);

Eigen::VectorXd gradient(const LinearSurrogate& model, const Eigen::VectorXd& x);
Eigen::VectorXd gradient(const QuadraticSurrogate& model, const Eigen::VectorXd& x);
double derivative(const Poly1DSurrogate& model, double x);
Eigen::VectorXd gradient(const Surrogate& model, const Eigen::VectorXd& x);

std::size_t input_dimension(const Surrogate& model) noexcept;

// True when any coordinate of a normalized point leaves [0, 1], or the 1-D
// abscissa leaves the polynomial's domain.
bool extrapolates(const Surrogate& model, const Eigen::VectorXd& x);

} // namespace optstudy
