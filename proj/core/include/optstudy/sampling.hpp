#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "optstudy/study.hpp"

namespace optstudy {

// (x - lower) / (upper - lower). Values outside the box map outside [0, 1].
double normalize(double x, double lower, double upper);
double denormalize(double t, double lower, double upper);

// +/-20% around a nonzero nominal, ordered ascending.
std::pair<double, double> default_range(double nominal);

enum class SampleMode { grid_1d, iid_uniform };

std::string_view to_string(SampleMode mode) noexcept;

struct SamplePlan {
  std::vector<std::string> names;
  Eigen::MatrixXd normalized; // N x m, in [0, 1]
  Eigen::MatrixXd raw;        // N x m, in [lower, upper]
  SampleMode mode = SampleMode::iid_uniform;
  std::uint64_t seed = 0;

  static constexpr std::string_view distribution = "uniform";

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(raw.cols()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(raw.rows()); }
};

// Sample count for m parameters at oversampling factor theta:
// m = 1 -> max(ceil(theta), 5); m >= 2 -> max(ceil(theta * m), m + 2).
std::size_t plan_size(std::size_t m, double theta);

// m = 1: inclusive even grid. m >= 2: i.i.d. uniform from UniformStream(seed).
SamplePlan plan_samples(std::span<const ParameterDef> params, double theta,
                        std::uint64_t seed);

// Header of parameter names, one row per point in raw units.
std::string plan_to_csv(const SamplePlan& plan);

Eigen::VectorXd normalize_point(std::span<const ParameterDef> params,
                                const Eigen::VectorXd& raw);
Eigen::VectorXd denormalize_point(std::span<const ParameterDef> params,
                                  const Eigen::VectorXd& unit);

} // namespace optstudy
