#include "optstudy/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "optstudy/csv.hpp"
#include "optstudy/error.hpp"
#include "optstudy/rng.hpp"

namespace optstudy {

namespace {

void check_range(double lower, double upper) {
  if (!(lower < upper))
    fail(ErrorCode::DegenerateRange,
         "lower " + format_exact(lower) + " is not below upper " + format_exact(upper));
}

} // namespace

double normalize(double x, double lower, double upper) {
  check_range(lower, upper);
  return (x - lower) / (upper - lower);
}

double denormalize(double t, double lower, double upper) {
  check_range(lower, upper);
  // Pin the endpoints so grid corners reproduce the bounds exactly.
  if (t == 0.0) return lower;
  if (t == 1.0) return upper;
  return lower + t * (upper - lower);
}

std::pair<double, double> default_range(double nominal) {
  if (nominal == 0.0 || !std::isfinite(nominal))
    fail(ErrorCode::ZeroNominal, "cannot derive a +/-20% range around a zero nominal; "
                                 "give an explicit range");
  const double a = 0.8 * nominal;
  const double b = 1.2 * nominal;
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

std::string_view to_string(SampleMode mode) noexcept {
  return mode == SampleMode::grid_1d ? "grid_1d" : "iid_uniform";
}

std::size_t plan_size(std::size_t m, double theta) {
  if (m == 1) return std::max<std::size_t>(static_cast<std::size_t>(std::ceil(theta)), 5);
  const auto n = static_cast<std::size_t>(std::ceil(theta * static_cast<double>(m)));
  return std::max(n, m + 2);
}

SamplePlan plan_samples(std::span<const ParameterDef> params, double theta, std::uint64_t seed) {
  require(!params.empty(), ErrorCode::PreconditionViolated, "sample plan needs at least one parameter");
  require(theta >= kMinTheta && theta <= kMaxTheta, ErrorCode::PreconditionViolated,
          "oversampling theta must lie in [2, 10]");
  for (const auto& p : params) check_range(p.lower, p.upper);

  const std::size_t m = params.size();
  const std::size_t n = plan_size(m, theta);
  SamplePlan plan;
  plan.seed = seed;
  plan.normalized.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  plan.raw.resizeLike(plan.normalized);
  for (const auto& p : params) plan.names.push_back(p.name);

  if (m == 1) {
    plan.mode = SampleMode::grid_1d;
    for (std::size_t i = 0; i < n; ++i)
      plan.normalized(static_cast<Eigen::Index>(i), 0) =
          i + 1 == n ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1);
  } else {
    plan.mode = SampleMode::iid_uniform;
    UniformStream rng(seed);
    for (Eigen::Index i = 0; i < plan.normalized.rows(); ++i)
      for (Eigen::Index j = 0; j < plan.normalized.cols(); ++j) plan.normalized(i, j) = rng.next_unit();
  }
  for (Eigen::Index i = 0; i < plan.raw.rows(); ++i)
    for (Eigen::Index j = 0; j < plan.raw.cols(); ++j) {
      const auto& p = params[static_cast<std::size_t>(j)];
      plan.raw(i, j) = denormalize(plan.normalized(i, j), p.lower, p.upper);
    }
  return plan;
}

std::string plan_to_csv(const SamplePlan& plan) {
  std::string out = format_csv_row(plan.names);
  for (Eigen::Index i = 0; i < plan.raw.rows(); ++i) {
    CsvRow row;
    for (Eigen::Index j = 0; j < plan.raw.cols(); ++j) row.push_back(format_exact(plan.raw(i, j)));
    out += format_csv_row(row);
  }
  return out;
}

Eigen::VectorXd normalize_point(std::span<const ParameterDef> params, const Eigen::VectorXd& raw) {
  Eigen::VectorXd out(raw.size());
  for (Eigen::Index j = 0; j < raw.size(); ++j) {
    const auto& p = params[static_cast<std::size_t>(j)];
    out(j) = normalize(raw(j), p.lower, p.upper);
  }
  return out;
}

Eigen::VectorXd denormalize_point(std::span<const ParameterDef> params, const Eigen::VectorXd& unit) {
  Eigen::VectorXd out(unit.size());
  for (Eigen::Index j = 0; j < unit.size(); ++j) {
    const auto& p = params[static_cast<std::size_t>(j)];
    out(j) = denormalize(unit(j), p.lower, p.upper);
  }
  return out;
}

} // namespace optstudy
