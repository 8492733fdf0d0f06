#include "optstudy/optimize.hpp"

#include <cmath>
#include <limits>

#include "optstudy/backend.hpp"
#include "optstudy/csv.hpp"
#include "optstudy/error.hpp"
#include "optstudy/sampling.hpp"

namespace optstudy {

Objective compile_objective(const GoalSpec& goal, const Surrogate& model, const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper) {
  const auto m = static_cast<Eigen::Index>(input_dimension(model));
  require(lower.size() == m && upper.size() == m, ErrorCode::PreconditionViolated,
          "objective box does not match the model dimension");
  Objective obj;
  obj.lower = lower;
  obj.upper = upper;
  switch (goal.kind) {
    case GoalKind::minimize:
      obj.eval = [model](const Eigen::VectorXd& x) { return predict(model, x); };
      obj.grad = [model](const Eigen::VectorXd& x) { return gradient(model, x); };
      obj.description = "minimize " + goal.qoi;
      break;
    case GoalKind::maximize:
      obj.eval = [model](const Eigen::VectorXd& x) { return -predict(model, x); };
      obj.grad = [model](const Eigen::VectorXd& x) { return Eigen::VectorXd(-gradient(model, x)); };
      obj.description = "maximize " + goal.qoi;
      break;
    case GoalKind::target:
    case GoalKind::below: {
      if (!goal.target) fail(ErrorCode::MissingTarget, "goal '" + std::string(to_string(goal.kind)) + "' needs a target");
      const double t = *goal.target;
      obj.eval = [model, t](const Eigen::VectorXd& x) {
        const double r = predict(model, x) - t;
        return r * r;
      };
      obj.grad = [model, t](const Eigen::VectorXd& x) {
        return Eigen::VectorXd(2.0 * (predict(model, x) - t) * gradient(model, x));
      };
      obj.description = "(" + goal.qoi + " - " + format_exact(t) + ")^2";
      break;
    }
    case GoalKind::min_input_at_target:
      fail(ErrorCode::UnsupportedGoal, "min_input_at_target is solved by its own scan, not as an objective");
  }
  return obj;
}

OptResult optimize_reduced(const ReducedModel& reduced, const ASResult& as, const GoalSpec& goal,
                           std::span<const ParameterDef> box) {
  const Eigen::VectorXd& w = as.direction;
  const auto m = static_cast<Eigen::Index>(box.size());
  require(w.size() == m, ErrorCode::PreconditionViolated, "direction dimension does not match the box");
  const Poly1DSurrogate& g = reduced.g;
  const Objective obj = compile_objective(goal, Surrogate{g}, Eigen::VectorXd::Constant(1, g.lower),
                                          Eigen::VectorXd::Constant(1, g.upper));
  auto f1 = [&](double z) { return obj.eval(Eigen::VectorXd::Constant(1, z)); };
  OptResult res;
  if (g.lower < g.upper) {
    res = minimize_scalar_bounded(f1, g.lower, g.upper);
  } else {
    res.x_star = Eigen::VectorXd::Constant(1, g.lower);
    res.termination = Termination::interval_tol;
  }
  const double z_star = res.x_star(0);

  const Eigen::VectorXd center = Eigen::VectorXd::Constant(m, 0.5);
  const Eigen::VectorXd x_norm = (center + (z_star - w.dot(center)) * w).cwiseMax(0.0).cwiseMin(1.0);
  const double z_actual = w.dot(x_norm);
  res.z_star = z_star;
  res.clamped = std::abs(z_actual - z_star) > 1e-6;
  if (res.clamped)
    res.warnings.push_back("box clamping moved the active variable from " + format_exact(z_star) + " to " +
                           format_exact(z_actual));
  res.x_star = denormalize_point(box, x_norm);
  res.objective_value = f1(z_actual);
  res.f_star = predict(g, z_actual);
  return res;
}

TargetCrossing min_input_at_target(const std::function<double(double)>& g, double lower, double upper,
                                   double target, double rel_tol) {
  require(lower <= upper, ErrorCode::PreconditionViolated, "target scan: empty interval");
  const double tol = rel_tol * std::abs(target);
  auto ok = [&](double v) { return std::abs(v - target) <= tol; };
  const std::size_t k = kTargetScanPoints;
  auto grid = [&](std::size_t i) {
    return i + 1 == k ? upper : lower + (upper - lower) * static_cast<double>(i) / static_cast<double>(k - 1);
  };

  TargetCrossing best{lower, g(lower), false};
  if (ok(best.value)) {
    best.reached = true;
    return best;
  }
  double best_gap = std::abs(best.value - target);
  for (std::size_t i = 1; i < k; ++i) {
    const double x = grid(i);
    const double v = g(x);
    if (ok(v)) {
      double a = grid(i - 1), b = x, vb = v;
      for (int it = 0; it < 200 && b - a > 0.0; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double vm = g(mid);
        if (ok(vm)) {
          b = mid;
          vb = vm;
        } else {
          a = mid;
        }
      }
      return {b, vb, true};
    }
    const double gap = std::abs(v - target);
    if (gap < best_gap) {
      best_gap = gap;
      best = {x, v, false};
    }
  }
  return best;
}

TargetCrossing min_input_at_target(const Poly1DSurrogate& surface, double target, double rel_tol) {
  return min_input_at_target([&](double x) { return predict(surface, x); }, surface.lower, surface.upper, target,
                             rel_tol);
}

ValidationReport validate_optimum(const BackendConfig& cfg, const QoISpec& qoi, std::span<const ParameterDef> params,
                                  const Eigen::VectorXd& x_star_raw, double predicted,
                                  const std::filesystem::path& case_dir) {
  ValidationReport rep;
  rep.predicted = predicted;
  try {
    EvaluationPoint point;
    point.index = 0;
    point.raw = x_star_raw;
    point.normalized = normalize_point(params, x_star_raw);
    point.extrapolation = (point.normalized.array() < 0.0).any() || (point.normalized.array() > 1.0).any();
    const RunRecord rec = run_case(cfg, qoi, params, point, case_dir);
    if (rec.status != RunStatus::ok || !rec.qoi_value) {
      rep.message = "validation run " + std::string(to_string(rec.status)) +
                    (rec.message.empty() ? "" : ": " + rec.message);
      return rep;
    }
    rep.available = true;
    rep.actual = *rec.qoi_value;
    rep.rel_error = std::abs(rep.actual - rep.predicted) / (1.0 + std::abs(rep.actual));
  } catch (const std::exception& e) {
    rep.message = std::string("validation unavailable: ") + e.what();
  }
  return rep;
}

} // namespace optstudy
