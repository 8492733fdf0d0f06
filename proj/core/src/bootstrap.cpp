#include <algorithm>
#include <cmath>

#include "optstudy/active_subspace.hpp"
#include "optstudy/error.hpp"
#include "optstudy/rng.hpp"

namespace optstudy {

namespace {

constexpr std::size_t kMaxRedraws = 20;

} // namespace

double vector_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
}

double percentile(std::vector<double> values, double pct) {
  require(!values.empty(), ErrorCode::PreconditionViolated, "percentile of an empty sample");
  require(pct >= 0.0 && pct <= 100.0, ErrorCode::PreconditionViolated, "percentile outside [0, 100]");
  std::sort(values.begin(), values.end());
  const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

BootstrapReport bootstrap_direction(const Eigen::MatrixXd& X, const Eigen::VectorXd& Q,
                                    std::size_t replicates, std::uint64_t seed) {
  require(replicates >= kMinBootstrapReplicates, ErrorCode::PreconditionViolated,
          "bootstrap needs at least " + std::to_string(kMinBootstrapReplicates) + " replicates");
  require(X.rows() == Q.size(), ErrorCode::PreconditionViolated, "X and Q row counts differ");

  BootstrapReport out;
  out.replicates = replicates;
  out.seed = seed;
  out.reference = active_direction_ols(fit_ols(X, Q)).direction;

  const Eigen::Index n = X.rows(), m = X.cols();
  std::vector<Eigen::VectorXd> dirs;
  dirs.reserve(replicates);
  Eigen::MatrixXd xs(n, m);
  Eigen::VectorXd qs(n);
  for (std::size_t r = 0; r < replicates; ++r) {
    UniformStream stream(derive_stream_seed(seed, r));
    bool done = false;
    for (std::size_t attempt = 0; attempt <= kMaxRedraws && !done; ++attempt) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<Eigen::Index>(stream.next_index(static_cast<std::size_t>(n)));
        xs.row(i) = X.row(k);
        qs(i) = Q(k);
      }
      try {
        Eigen::VectorXd w = active_direction_ols(fit_ols(xs, qs)).direction;
        if (w.dot(out.reference) < 0.0) w = -w;
        dirs.push_back(std::move(w));
        done = true;
      } catch (const StudyError& e) {
        if (e.code() != ErrorCode::RankDeficient && e.code() != ErrorCode::ZeroGradient) throw;
        ++out.rank_deficient_draws;
      }
    }
    if (!done)
      fail(ErrorCode::BootstrapDegenerate, "bootstrap replicate " + std::to_string(r) + " stayed rank-deficient after " +
                                               std::to_string(kMaxRedraws) + " redraws; add samples");
  }
  const std::size_t draws = dirs.size() + out.rank_deficient_draws;
  if (2 * out.rank_deficient_draws > draws)
    fail(ErrorCode::BootstrapDegenerate, std::to_string(out.rank_deficient_draws) + " of " + std::to_string(draws) +
                                             " bootstrap resamples were rank-deficient; add samples");

  for (Eigen::Index j = 0; j < m; ++j) {
    std::vector<double> comp;
    comp.reserve(dirs.size());
    for (const auto& d : dirs) comp.push_back(d(j));
    out.component_ci.emplace_back(percentile(comp, 2.5), percentile(comp, 97.5));
  }
  std::vector<double> angles;
  angles.reserve(dirs.size());
  for (const auto& d : dirs) angles.push_back(vector_angle(d, out.reference));
  out.angle_ci = {percentile(angles, 2.5), percentile(angles, 97.5)};
  return out;
}

} // namespace optstudy
