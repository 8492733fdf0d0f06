#pragma once

#include <cstddef>
#include <deque>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optstudy/active_subspace.hpp"
#include "optstudy/study.hpp"
#include "optstudy/surrogate.hpp"

namespace optstudy {

struct Objective {
  std::function<double(const Eigen::VectorXd&)> eval;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::string description;

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(lower.size()); }
};

// minimize -> p, maximize -> -p, target/below T -> (p - T)^2, with p the
// surrogate prediction. min_input_at_target has its own solver and throws
// UnsupportedGoal here.
Objective compile_objective(const GoalSpec& goal, const Surrogate& model,
                            const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

enum class Termination { gradient_tol, max_iter, line_search_fail, interval_tol };

std::string_view to_string(Termination t) noexcept;

struct TracePoint {
  double objective = 0.0;
  double progress = 0.0; // projected-gradient norm or bracket width
};

struct OptResult {
  Eigen::VectorXd x_star;
  double f_star = 0.0;          // surrogate prediction at x_star when known
  double objective_value = 0.0; // eval(x_star)
  std::size_t iterations = 0;
  Termination termination = Termination::max_iter;
  std::vector<TracePoint> trace;
  bool clamped = false;          // back-mapping moved w^T x away from z*
  std::optional<double> z_star;  // reduced-space optimum
  std::vector<std::string> warnings;
};

// Limited-memory inverse-Hessian approximation (two-loop recursion).
class LbfgsMemory {
public:
  explicit LbfgsMemory(std::size_t capacity) : capacity_(capacity) {}

  // Stores (s, y) when s^T y > 1e-12 ||s|| ||y||; evicts the oldest pair
  // beyond capacity. Returns whether the pair was admitted.
  bool push(const Eigen::VectorXd& s, const Eigen::VectorXd& y);

  // -H g, where H starts from gamma * I with gamma = s^T y / y^T y of the
  // newest pair. Components flagged in `fixed` are excluded and zero.
  Eigen::VectorXd direction(const Eigen::VectorXd& g, const std::vector<bool>& fixed) const;

  std::size_t size() const noexcept { return s_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  void clear() noexcept { s_.clear(); y_.clear(); }

private:
  std::size_t capacity_;
  std::deque<Eigen::VectorXd> s_;
  std::deque<Eigen::VectorXd> y_;
};

struct LbfgsbOptions {
  double tolerance = 1e-8;
  std::size_t memory = 10;
  std::size_t max_iter = 500;
  double armijo_c1 = 1e-4;
  std::size_t max_backtracks = 60;
};

// Projected gradient P(x - g) - x, zero in components pinned at a bound.
Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

OptResult minimize_lbfgsb(const Objective& objective, Eigen::VectorXd x0,
                          const LbfgsbOptions& options = {});

// Brent's bounded minimizer (golden section with parabolic steps), followed
// by a comparison against both endpoints. f is only called inside the
// closed interval.
OptResult minimize_scalar_bounded(const std::function<double(double)>& f, double lower,
                                  double upper, double tol = 1e-10);

// Solves the goal against g(z) over the observed z range, then maps back
// along the direction through the normalized box center and clamps to the
// unit box. x_star is returned in raw units.
OptResult optimize_reduced(const ReducedModel& reduced, const ASResult& as,
                           const GoalSpec& goal, std::span<const ParameterDef> box);

struct TargetCrossing {
  double x = 0.0;
  double value = 0.0;
  bool reached = false;
};

inline constexpr double kTargetRelTol = 0.02;
inline constexpr std::size_t kTargetScanPoints = 1000;

// Smallest x with |g(x) - target| <= rel_tol |target|: dense scan, then
// bisection on the bracketing cell. Falls back to argmin |g - target|.
TargetCrossing min_input_at_target(const std::function<double(double)>& g, double lower,
                                   double upper, double target, double rel_tol = kTargetRelTol);
TargetCrossing min_input_at_target(const Poly1DSurrogate& surface, double target,
                                   double rel_tol = kTargetRelTol);

struct ValidationReport {
  bool available = false;
  double actual = 0.0;
  double predicted = 0.0;
  double rel_error = 0.0; // |actual - predicted| / (1 + |actual|)
  std::string message;
};

// One extra backend run at x_star_raw; run failures come back as
// available == false, never as an exception.
ValidationReport validate_optimum(const BackendConfig& cfg, const QoISpec& qoi,
                                  std::span<const ParameterDef> params,
                                  const Eigen::VectorXd& x_star_raw, double predicted,
                                  const std::filesystem::path& case_dir);

} // namespace optstudy
