#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace optstudy {

// Where a parameter's bounds came from. Bounds derived from a nominal value
// (+/-20%) are never presented as if the user had typed them.
enum class RangeOrigin { explicit_bounds, nominal_default };

struct ParameterDef {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  std::optional<double> nominal;
  std::string units;
  RangeOrigin range_origin = RangeOrigin::explicit_bounds;

  bool operator==(const ParameterDef&) const = default;
};

struct RegexLastMatch {
  std::string file_pattern;
  std::string pattern;
  bool operator==(const RegexLastMatch&) const = default;
};

enum class AggregateOp { max, min, mean, last };

struct CsvAggregate {
  std::string file_pattern;
  std::string column;
  AggregateOp op = AggregateOp::max;
  bool operator==(const CsvAggregate&) const = default;
};

struct BackendDirect {
  bool operator==(const BackendDirect&) const = default;
};

using Extraction = std::variant<RegexLastMatch, CsvAggregate, BackendDirect>;

struct AffineTransform {
  double scale = 1.0;
  double offset = 0.0;
  bool operator==(const AffineTransform&) const = default;
};

struct QoISpec {
  std::string name;
  Extraction extraction = BackendDirect{};
  std::optional<AffineTransform> transform;

  bool operator==(const QoISpec&) const = default;
};

enum class GoalKind { minimize, maximize, target, below, min_input_at_target };

struct GoalSpec {
  GoalKind kind = GoalKind::minimize;
  std::optional<double> target;
  std::string qoi;

  bool operator==(const GoalSpec&) const = default;
};

bool goal_requires_target(GoalKind kind) noexcept;

enum class BackendKind { process_template, analytic };

struct BackendConfig {
  BackendKind kind = BackendKind::analytic;
  std::string template_dir;
  std::vector<std::string> run_command;
  double timeout_seconds = 3600.0;
  std::string analytic_name;
  std::map<std::string, double> analytic_params;

  bool operator==(const BackendConfig&) const = default;
};

struct SimulationTask {
  std::string description;
  std::optional<BackendConfig> backend;
  bool operator==(const SimulationTask&) const = default;
};

struct PostprocessTask {
  std::string description;
  QoISpec qoi;
  bool operator==(const PostprocessTask&) const = default;
};

struct AnalysisTask {
  std::string description;
  std::vector<ParameterDef> parameters;
  bool operator==(const AnalysisTask&) const = default;
};

struct StudySettings {
  std::uint64_t seed = 0;
  double theta = 4.0;
  bool operator==(const StudySettings&) const = default;
};

inline constexpr double kDefaultTheta = 4.0;
inline constexpr double kMinTheta = 2.0;
inline constexpr double kMaxTheta = 10.0;

struct StudySpec {
  SimulationTask simulation;
  PostprocessTask postprocess;
  AnalysisTask analysis;
  std::optional<GoalSpec> goal;
  StudySettings settings;

  bool operator==(const StudySpec&) const = default;

  std::size_t dimension() const noexcept { return analysis.parameters.size(); }
};

// Throws ValidationError naming the first violated invariant.
void validate(const ParameterDef& param);
void validate(const QoISpec& qoi);
void validate(const GoalSpec& goal);
void validate(const BackendConfig& backend);
void validate(const StudySpec& spec);

// Lowercase-free snake_case: spaces and hyphens become underscores, markup
// characters are dropped, runs of underscores collapse.
std::string to_identifier(std::string_view text);

std::string_view to_string(GoalKind kind) noexcept;
std::string_view to_string(AggregateOp op) noexcept;
std::string_view to_string(BackendKind kind) noexcept;
std::string_view to_string(RangeOrigin origin) noexcept;

std::optional<GoalKind> parse_goal_kind(std::string_view text) noexcept;
std::optional<AggregateOp> parse_aggregate_op(std::string_view text) noexcept;
std::optional<BackendKind> parse_backend_kind(std::string_view text) noexcept;
std::optional<RangeOrigin> parse_range_origin(std::string_view text) noexcept;

} // namespace optstudy
