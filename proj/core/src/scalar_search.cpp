#include <algorithm>
#include <cmath>
#include <limits>

#include "optstudy/error.hpp"
#include "optstudy/optimize.hpp"

namespace optstudy {

OptResult minimize_scalar_bounded(const std::function<double(double)>& f, double lower, double upper,
                                  double tol) {
  require(lower < upper, ErrorCode::PreconditionViolated, "scalar search: lower must be below upper");
  require(tol > 0.0, ErrorCode::PreconditionViolated, "scalar search: tolerance must be positive");
  constexpr std::size_t kMaxIter = 1000;
  const double golden_ratio = 0.5 * (3.0 - std::sqrt(5.0));
  auto eval = [&](double x) { return f(std::clamp(x, lower, upper)); };
  auto tolerance = [&](double x) { return 0.24 * tol * (1.0 + std::abs(x)); };

  OptResult res;
  double a = lower, b = upper;
  double v = a + golden_ratio * (b - a);
  double w = v, xf = v;
  double fx = eval(xf);
  double fv = fx, fw = fx;
  double d = 0.0, e = 0.0;
  double xm = 0.5 * (a + b);
  double tol1 = tolerance(xf);
  double tol2 = 2.0 * tol1;
  res.trace.push_back({fx, b - a});

  std::size_t iter = 0;
  while (std::abs(xf - xm) > tol2 - 0.5 * (b - a) && iter < kMaxIter) {
    ++iter;
    bool golden = true;
    if (std::abs(e) > tol1) {
      // try a parabolic step through (xf, w, v)
      double r = (xf - w) * (fx - fv);
      double q = (xf - v) * (fx - fw);
      double p = (xf - v) * q - (xf - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      r = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * r) && p > q * (a - xf) && p < q * (b - xf)) {
        d = p / q;
        const double u = xf + d;
        if (u - a < tol2 || b - u < tol2) d = xm >= xf ? tol1 : -tol1;
        golden = false;
      }
    }
    if (golden) {
      e = xf >= xm ? a - xf : b - xf;
      d = golden_ratio * e;
    }
    const double step = std::max(std::abs(d), tol1);
    const double u = std::clamp(xf + (d >= 0.0 ? step : -step), lower, upper);
    const double fu = eval(u);
    if (fu <= fx) {
      if (u >= xf) a = xf;
      else b = xf;
      v = w; fv = fw;
      w = xf; fw = fx;
      xf = u; fx = fu;
    } else {
      if (u < xf) a = u;
      else b = u;
      if (fu <= fw || w == xf) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == xf || v == w) {
        v = u; fv = fu;
      }
    }
    xm = 0.5 * (a + b);
    tol1 = tolerance(xf);
    tol2 = 2.0 * tol1;
    res.trace.push_back({fx, b - a});
  }
  res.iterations = iter;
  res.termination = iter < kMaxIter ? Termination::interval_tol : Termination::max_iter;

  // the optimum of a monotone function sits on a face
  const double f_lo = eval(lower);
  const double f_hi = eval(upper);
  if (f_lo < fx) { xf = lower; fx = f_lo; }
  if (f_hi < fx) { xf = upper; fx = f_hi; }

  res.x_star = Eigen::VectorXd::Constant(1, xf);
  res.objective_value = fx;
  res.f_star = fx;
  return res;
}

} // namespace optstudy
