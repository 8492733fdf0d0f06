#include <cmath>

#include "optstudy/error.hpp"
#include "optstudy/optimize.hpp"

namespace optstudy {

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::gradient_tol: return "gradient_tol";
    case Termination::max_iter: return "max_iter";
    case Termination::line_search_fail: return "line_search_fail";
    case Termination::interval_tol: return "interval_tol";
  }
  return "max_iter";
}

bool LbfgsMemory::push(const Eigen::VectorXd& s, const Eigen::VectorXd& y) {
  if (capacity_ == 0) return false;
  if (!(s.dot(y) > 1e-12 * s.norm() * y.norm())) return false;
  s_.push_back(s);
  y_.push_back(y);
  while (s_.size() > capacity_) {
    s_.pop_front();
    y_.pop_front();
  }
  return true;
}

Eigen::VectorXd LbfgsMemory::direction(const Eigen::VectorXd& g, const std::vector<bool>& fixed) const {
  const Eigen::Index n = g.size();
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (fixed[static_cast<std::size_t>(i)]) mask(i) = 0.0;

  Eigen::VectorXd q = g.cwiseProduct(mask);
  const std::size_t k = s_.size();
  std::vector<double> alpha(k, 0.0), rho(k, 0.0);
  std::vector<bool> use(k, false);
  double gamma = 1.0;
  bool have_gamma = false;
  for (std::size_t i = k; i-- > 0;) {
    const Eigen::VectorXd s = s_[i].cwiseProduct(mask);
    const Eigen::VectorXd y = y_[i].cwiseProduct(mask);
    const double sy = s.dot(y);
    if (!(sy > 1e-12 * s.norm() * y.norm())) continue;
    use[i] = true;
    rho[i] = 1.0 / sy;
    if (!have_gamma) {
      gamma = sy / y.squaredNorm();
      have_gamma = true;
    }
    alpha[i] = rho[i] * s.dot(q);
    q -= alpha[i] * y;
  }
  Eigen::VectorXd r = gamma * q;
  for (std::size_t i = 0; i < k; ++i) {
    if (!use[i]) continue;
    const Eigen::VectorXd s = s_[i].cwiseProduct(mask);
    const Eigen::VectorXd y = y_[i].cwiseProduct(mask);
    const double beta = rho[i] * y.dot(r);
    r += (alpha[i] - beta) * s;
  }
  return (-r).cwiseProduct(mask);
}

Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  return (x - g).cwiseMax(lower).cwiseMin(upper) - x;
}

OptResult minimize_lbfgsb(const Objective& objective, Eigen::VectorXd x0, const LbfgsbOptions& options) {
  const auto& lo = objective.lower;
  const auto& hi = objective.upper;
  require(x0.size() == lo.size() && lo.size() == hi.size() && lo.size() > 0, ErrorCode::PreconditionViolated,
          "L-BFGS-B: dimension mismatch");
  require((lo.array() <= hi.array()).all(), ErrorCode::PreconditionViolated, "L-BFGS-B: lower bound above upper");

  OptResult res;
  Eigen::VectorXd x = x0.cwiseMax(lo).cwiseMin(hi);
  if (x != x0) res.warnings.push_back("initial point was outside the box and has been clamped");

  LbfgsMemory memory(options.memory);
  double f = objective.eval(x);
  Eigen::VectorXd g = objective.grad(x);
  const Eigen::Index n = x.size();
  res.termination = Termination::max_iter;

  for (std::size_t iter = 0;; ++iter) {
    const double pg_norm = projected_gradient(x, g, lo, hi).norm();
    res.trace.push_back({f, pg_norm});
    res.iterations = iter;
    if (pg_norm < options.tolerance) {
      res.termination = Termination::gradient_tol;
      break;
    }
    if (iter >= options.max_iter) {
      res.termination = Termination::max_iter;
      break;
    }

    std::vector<bool> fixed(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i)
      fixed[static_cast<std::size_t>(i)] = (x(i) <= lo(i) && g(i) > 0.0) || (x(i) >= hi(i) && g(i) < 0.0);

    Eigen::VectorXd d = memory.direction(g, fixed);
    if (!(g.dot(d) < 0.0)) {
      memory.clear();
      d = memory.direction(g, fixed);
    }

    bool accepted = false;
    double alpha = 1.0;
    Eigen::VectorXd x_new;
    double f_new = f;
    for (std::size_t t = 0; t < options.max_backtracks; ++t, alpha *= 0.5) {
      x_new = (x + alpha * d).cwiseMax(lo).cwiseMin(hi);
      const double decrease = g.dot(x_new - x);
      if (!(decrease < 0.0)) continue;
      f_new = objective.eval(x_new);
      if (std::isfinite(f_new) && f_new <= f + options.armijo_c1 * decrease) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.termination = Termination::line_search_fail;
      break;
    }
    const Eigen::VectorXd g_new = objective.grad(x_new);
    memory.push(x_new - x, g_new - g);
    x = x_new;
    f = f_new;
    g = g_new;
  }

  res.x_star = x;
  res.objective_value = objective.eval(x);
  res.f_star = res.objective_value;
  return res;
}

} // namespace optstudy
