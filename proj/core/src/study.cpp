#include "optstudy/study.hpp"

#include <cctype>
#include <cmath>
#include <set>

#include "optstudy/analytic.hpp"
#include "optstudy/error.hpp"

namespace optstudy {

namespace {

void invalid(const std::string& what) { fail(ErrorCode::ValidationError, what); }

} // namespace

bool goal_requires_target(GoalKind kind) noexcept {
  return kind == GoalKind::target || kind == GoalKind::below ||
         kind == GoalKind::min_input_at_target;
}

void validate(const ParameterDef& p) {
  if (p.name.empty()) invalid("parameter name must be non-empty");
  if (!std::isfinite(p.lower) || !std::isfinite(p.upper))
    invalid("parameter '" + p.name + "': bounds must be finite");
  if (!(p.lower < p.upper))
    invalid("parameter '" + p.name + "': lower < upper violated");
  if (p.nominal) {
    if (!std::isfinite(*p.nominal) || *p.nominal < p.lower || *p.nominal > p.upper)
      invalid("parameter '" + p.name + "': lower <= nominal <= upper violated");
  }
}

void validate(const QoISpec& qoi) {
  if (qoi.name.empty()) invalid("qoi name must be non-empty");
  if (const auto* rx = std::get_if<RegexLastMatch>(&qoi.extraction)) {
    if (rx->file_pattern.empty() || rx->pattern.empty())
      invalid("qoi '" + qoi.name + "': regex extraction needs file_pattern and pattern");
  } else if (const auto* csv = std::get_if<CsvAggregate>(&qoi.extraction)) {
    if (csv->file_pattern.empty() || csv->column.empty())
      invalid("qoi '" + qoi.name + "': csv extraction needs file_pattern and column");
  }
  if (qoi.transform) {
    if (qoi.transform->scale == 0.0 || !std::isfinite(qoi.transform->scale) ||
        !std::isfinite(qoi.transform->offset))
      invalid("qoi '" + qoi.name + "': transform scale must be finite and nonzero");
  }
}

void validate(const GoalSpec& goal) {
  const bool needs = goal_requires_target(goal.kind);
  if (needs && !goal.target)
    invalid(std::string("goal '") + std::string(to_string(goal.kind)) + "' requires a target");
  if (!needs && goal.target)
    invalid(std::string("goal '") + std::string(to_string(goal.kind)) + "' takes no target");
  if (goal.target && !std::isfinite(*goal.target)) invalid("goal target must be finite");
}

void validate(const BackendConfig& b) {
  if (!(b.timeout_seconds > 0.0)) invalid("backend timeout must be positive");
  if (b.kind == BackendKind::process_template) {
    if (b.template_dir.empty()) invalid("process_template backend requires template_dir");
    if (b.run_command.empty()) invalid("process_template backend requires run_command");
  } else {
    if (b.analytic_name.empty()) invalid("analytic backend requires analytic_name");
    if (!is_analytic_registered(b.analytic_name))
      invalid("analytic backend '" + b.analytic_name + "' is not registered");
  }
}

void validate(const StudySpec& spec) {
  if (spec.analysis.parameters.empty()) invalid("study needs at least one parameter");
  std::set<std::string> seen;
  for (const auto& p : spec.analysis.parameters) {
    validate(p);
    if (!seen.insert(p.name).second) invalid("duplicate parameter name '" + p.name + "'");
  }
  validate(spec.postprocess.qoi);
  if (spec.goal) validate(*spec.goal);
  if (spec.simulation.backend) validate(*spec.simulation.backend);
  const double theta = spec.settings.theta;
  if (!(theta >= kMinTheta && theta <= kMaxTheta))
    invalid("oversampling theta must lie in [2, 10]");
}

std::string to_identifier(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (ch == ' ' || ch == '-' || ch == '\t' || ch == '_') {
      if (!out.empty() && out.back() != '_') out.push_back('_');
    } else if (std::isalnum(c) || c >= 0x80) {
      out.push_back(ch);
    }
    // '$', '\\', '{', '}', '`', '(' and similar markup are dropped
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::string_view to_string(GoalKind kind) noexcept {
  switch (kind) {
    case GoalKind::minimize: return "minimize";
    case GoalKind::maximize: return "maximize";
    case GoalKind::target: return "target";
    case GoalKind::below: return "below";
    case GoalKind::min_input_at_target: return "min_input_at_target";
  }
  return "minimize";
}

std::string_view to_string(AggregateOp op) noexcept {
  switch (op) {
    case AggregateOp::max: return "max";
    case AggregateOp::min: return "min";
    case AggregateOp::mean: return "mean";
    case AggregateOp::last: return "last";
  }
  return "max";
}

std::string_view to_string(BackendKind kind) noexcept {
  return kind == BackendKind::analytic ? "analytic" : "process_template";
}

std::string_view to_string(RangeOrigin origin) noexcept {
  return origin == RangeOrigin::explicit_bounds ? "explicit" : "nominal_default";
}

std::optional<GoalKind> parse_goal_kind(std::string_view t) noexcept {
  for (auto k : {GoalKind::minimize, GoalKind::maximize, GoalKind::target, GoalKind::below,
                 GoalKind::min_input_at_target})
    if (to_string(k) == t) return k;
  return std::nullopt;
}

std::optional<AggregateOp> parse_aggregate_op(std::string_view t) noexcept {
  for (auto op : {AggregateOp::max, AggregateOp::min, AggregateOp::mean, AggregateOp::last})
    if (to_string(op) == t) return op;
  return std::nullopt;
}

std::optional<BackendKind> parse_backend_kind(std::string_view t) noexcept {
  if (t == "analytic") return BackendKind::analytic;
  if (t == "process_template") return BackendKind::process_template;
  return std::nullopt;
}

std::optional<RangeOrigin> parse_range_origin(std::string_view t) noexcept {
  if (t == "explicit") return RangeOrigin::explicit_bounds;
  if (t == "nominal_default") return RangeOrigin::nominal_default;
  return std::nullopt;
}

} // namespace optstudy
