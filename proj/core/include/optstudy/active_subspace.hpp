#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "optstudy/surrogate.hpp"

namespace optstudy {

enum class DirectionSource { ols_rank1, quadratic };

std::string_view to_string(DirectionSource source) noexcept;

struct ASResult {
  Eigen::VectorXd direction;    // unit norm, sign convention applied
  Eigen::VectorXd eigenvalues;  // descending
  Eigen::MatrixXd eigenvectors; // orthonormal, column 0 == direction
  Eigen::MatrixXd covariance;   // the C-hat that was decomposed
  std::optional<std::size_t> split; // n with lambda_n >> lambda_{n+1}, 1-based
  DirectionSource source = DirectionSource::ols_rank1;
  std::vector<std::string> param_names;
};

inline constexpr double kEigenGapRatio = 10.0;

// Rank-one estimate C = b b^T: direction b / ||b||, eigenvalue ||b||^2.
ASResult active_direction_ols(const LinearSurrogate& model,
                              std::vector<std::string> names = {});

// C = (1/N) sum_j g_j g_j^T with g_j = b + 2 A x_j, decomposed by Jacobi.
ASResult active_subspace_quadratic(const QuadraticSurrogate& model, const Eigen::MatrixXd& X,
                                   std::vector<std::string> names = {});

// argmax_n lambda_n / (lambda_{n+1} + 1e-300) when that ratio exceeds 10.
std::optional<std::size_t> eigen_gap(std::span<const double> eigenvalues);

struct BootstrapReport {
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<double, double>> component_ci; // 2.5th, 97.5th percentiles
  std::pair<double, double> angle_ci{0.0, 0.0};       // radians
  std::size_t rank_deficient_draws = 0;
  Eigen::VectorXd reference;
};

inline constexpr std::size_t kDefaultBootstrapReplicates = 200;
inline constexpr std::size_t kMinBootstrapReplicates = 10;

// Row resampling with replacement, OLS refit per replicate. Replicate r
// draws from UniformStream(derive_stream_seed(seed, r)).
BootstrapReport bootstrap_direction(const Eigen::MatrixXd& X, const Eigen::VectorXd& Q,
                                    std::size_t replicates, std::uint64_t seed);

// Angle between two unit vectors, accurate near zero.
double vector_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Linearly interpolated percentile (0..100) of unsorted data.
double percentile(std::vector<double> values, double pct);

struct ReducedModel {
  Eigen::VectorXd z_values;
  Poly1DSurrogate g;
  double r_squared = 0.0;
};

ReducedModel build_reduced_model(const Eigen::MatrixXd& X, const Eigen::VectorXd& Q,
                                 const Eigen::VectorXd& direction);

struct SummaryPlotData {
  std::vector<std::pair<double, double>> points;
  std::vector<std::pair<double, double>> curve;
  std::vector<std::pair<std::string, double>> component_bars;
};

inline constexpr std::size_t kSummaryCurvePoints = 200;

SummaryPlotData summary_data(const Eigen::MatrixXd& X, const Eigen::VectorXd& Q,
                             const Eigen::VectorXd& direction, const Poly1DSurrogate& g,
                             std::span<const std::string> names);

} // namespace optstudy
