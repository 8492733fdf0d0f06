#include "optstudy/study_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "optstudy/digest.hpp"
#include "optstudy/error.hpp"

namespace optstudy {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void schema(const std::string& path, const std::string& what) {
  fail(ErrorCode::SchemaError, path + ": " + what);
}

void only_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) schema(path, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) schema(path + "." + k, "unknown field");
}

const Json* optional_field(const Json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

const Json& required_field(const Json& obj, const std::string& path, const char* key) {
  const Json* v = optional_field(obj, key);
  if (!v) schema(path + "." + key, "missing required field");
  return *v;
}

std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) schema(path, "expected a string");
  return v.get<std::string>();
}

double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) schema(path, "expected a number");
  return v.get<double>();
}

std::string string_or(const Json& obj, const std::string& path, const char* key,
                      std::string fallback = {}) {
  const Json* v = optional_field(obj, key);
  return v ? as_string(*v, path + "." + key) : fallback;
}

BackendConfig parse_backend(const Json& j, const std::string& path,
                            const std::filesystem::path& base_dir) {
  only_keys(j, path, {"kind", "template_dir", "run_command", "timeout", "analytic_name",
                      "analytic_params"});
  BackendConfig b;
  const auto kind_text = as_string(required_field(j, path, "kind"), path + ".kind");
  auto kind = parse_backend_kind(kind_text);
  if (!kind) schema(path + ".kind", "expected 'analytic' or 'process_template'");
  b.kind = *kind;
  if (const Json* t = optional_field(j, "timeout")) b.timeout_seconds = as_number(*t, path + ".timeout");
  if (b.kind == BackendKind::process_template) {
    std::filesystem::path dir = as_string(required_field(j, path, "template_dir"), path + ".template_dir");
    if (dir.is_relative() && !base_dir.empty()) dir = base_dir / dir;
    b.template_dir = dir.lexically_normal().string();
    const Json& cmd = required_field(j, path, "run_command");
    if (!cmd.is_array()) schema(path + ".run_command", "expected an array of strings");
    for (std::size_t i = 0; i < cmd.size(); ++i)
      b.run_command.push_back(as_string(cmd[i], path + ".run_command[" + std::to_string(i) + "]"));
  } else {
    b.analytic_name = as_string(required_field(j, path, "analytic_name"), path + ".analytic_name");
    if (const Json* params = optional_field(j, "analytic_params")) {
      if (!params->is_object()) schema(path + ".analytic_params", "expected an object");
      for (const auto& [k, v] : params->items())
        b.analytic_params[k] = as_number(v, path + ".analytic_params." + k);
    }
  }
  return b;
}

QoISpec parse_qoi(const Json& j, const std::string& path) {
  only_keys(j, path, {"name", "extraction", "transform"});
  QoISpec q;
  q.name = as_string(required_field(j, path, "name"), path + ".name");
  if (const Json* e = optional_field(j, "extraction")) {
    const std::string ep = path + ".extraction";
    const auto mode = as_string(required_field(*e, ep, "mode"), ep + ".mode");
    if (mode == "regex_last_match") {
      only_keys(*e, ep, {"mode", "file_pattern", "pattern"});
      q.extraction = RegexLastMatch{as_string(required_field(*e, ep, "file_pattern"), ep + ".file_pattern"),
                                    as_string(required_field(*e, ep, "pattern"), ep + ".pattern")};
    } else if (mode == "csv_aggregate") {
      only_keys(*e, ep, {"mode", "file_pattern", "column", "op"});
      CsvAggregate c;
      c.file_pattern = as_string(required_field(*e, ep, "file_pattern"), ep + ".file_pattern");
      c.column = as_string(required_field(*e, ep, "column"), ep + ".column");
      const auto op_text = as_string(required_field(*e, ep, "op"), ep + ".op");
      auto op = parse_aggregate_op(op_text);
      if (!op) schema(ep + ".op", "expected one of max, min, mean, last");
      c.op = *op;
      q.extraction = c;
    } else if (mode == "backend_direct") {
      only_keys(*e, ep, {"mode"});
      q.extraction = BackendDirect{};
    } else {
      schema(ep + ".mode", "expected regex_last_match, csv_aggregate or backend_direct");
    }
  }
  if (const Json* t = optional_field(j, "transform")) {
    const std::string tp = path + ".transform";
    only_keys(*t, tp, {"scale", "offset"});
    AffineTransform tr;
    if (const Json* s = optional_field(*t, "scale")) tr.scale = as_number(*s, tp + ".scale");
    if (const Json* o = optional_field(*t, "offset")) tr.offset = as_number(*o, tp + ".offset");
    q.transform = tr;
  }
  return q;
}

ParameterDef parse_parameter(const Json& j, const std::string& path) {
  only_keys(j, path, {"name", "lower", "upper", "nominal", "units", "range_origin"});
  ParameterDef p;
  p.name = as_string(required_field(j, path, "name"), path + ".name");
  p.lower = as_number(required_field(j, path, "lower"), path + ".lower");
  p.upper = as_number(required_field(j, path, "upper"), path + ".upper");
  if (const Json* n = optional_field(j, "nominal")) p.nominal = as_number(*n, path + ".nominal");
  p.units = string_or(j, path, "units");
  if (const Json* o = optional_field(j, "range_origin")) {
    auto origin = parse_range_origin(as_string(*o, path + ".range_origin"));
    if (!origin) schema(path + ".range_origin", "expected 'explicit' or 'nominal_default'");
    p.range_origin = *origin;
  }
  return p;
}

GoalSpec parse_goal(const Json& j, const std::string& path) {
  only_keys(j, path, {"kind", "target", "qoi"});
  GoalSpec g;
  auto kind = parse_goal_kind(as_string(required_field(j, path, "kind"), path + ".kind"));
  if (!kind) schema(path + ".kind", "expected minimize, maximize, target, below or min_input_at_target");
  g.kind = *kind;
  if (const Json* t = optional_field(j, "target")) g.target = as_number(*t, path + ".target");
  g.qoi = string_or(j, path, "qoi");
  return g;
}

Json render_backend(const BackendConfig& b) {
  Json j;
  j["kind"] = std::string(to_string(b.kind));
  if (b.kind == BackendKind::process_template) {
    j["template_dir"] = b.template_dir;
    j["run_command"] = b.run_command;
  } else {
    j["analytic_name"] = b.analytic_name;
    Json params = Json::object();
    for (const auto& [k, v] : b.analytic_params) params[k] = v;
    j["analytic_params"] = params;
  }
  j["timeout"] = b.timeout_seconds;
  return j;
}

Json render_qoi(const QoISpec& q) {
  Json j;
  j["name"] = q.name;
  Json e;
  if (const auto* rx = std::get_if<RegexLastMatch>(&q.extraction)) {
    e["mode"] = "regex_last_match";
    e["file_pattern"] = rx->file_pattern;
    e["pattern"] = rx->pattern;
  } else if (const auto* csv = std::get_if<CsvAggregate>(&q.extraction)) {
    e["mode"] = "csv_aggregate";
    e["file_pattern"] = csv->file_pattern;
    e["column"] = csv->column;
    e["op"] = std::string(to_string(csv->op));
  } else {
    e["mode"] = "backend_direct";
  }
  j["extraction"] = e;
  if (q.transform) j["transform"] = Json{{"scale", q.transform->scale}, {"offset", q.transform->offset}};
  return j;
}

} // namespace

StudySpec parse_study_text(std::string_view text, const std::filesystem::path& base_dir) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::SchemaError, std::string("$: not valid JSON (") + e.what() + ")");
  }
  only_keys(root, "$", {"simulation", "postprocess", "analysis", "parameters", "goal", "settings"});

  StudySpec spec;
  if (const Json* sim = optional_field(root, "simulation")) {
    only_keys(*sim, "$.simulation", {"description", "backend"});
    spec.simulation.description = string_or(*sim, "$.simulation", "description");
    if (const Json* b = optional_field(*sim, "backend"))
      spec.simulation.backend = parse_backend(*b, "$.simulation.backend", base_dir);
  }
  const Json& post = required_field(root, "$", "postprocess");
  only_keys(post, "$.postprocess", {"description", "qoi"});
  spec.postprocess.description = string_or(post, "$.postprocess", "description");
  spec.postprocess.qoi = parse_qoi(required_field(post, "$.postprocess", "qoi"), "$.postprocess.qoi");

  if (const Json* an = optional_field(root, "analysis")) {
    only_keys(*an, "$.analysis", {"description"});
    spec.analysis.description = string_or(*an, "$.analysis", "description");
  }
  const Json& params = required_field(root, "$", "parameters");
  if (!params.is_array()) schema("$.parameters", "expected an array");
  for (std::size_t i = 0; i < params.size(); ++i)
    spec.analysis.parameters.push_back(parse_parameter(params[i], "$.parameters[" + std::to_string(i) + "]"));

  if (const Json* g = optional_field(root, "goal")) {
    spec.goal = parse_goal(*g, "$.goal");
    if (spec.goal->qoi.empty()) spec.goal->qoi = spec.postprocess.qoi.name;
  }
  if (const Json* s = optional_field(root, "settings")) {
    only_keys(*s, "$.settings", {"seed", "theta"});
    if (const Json* seed = optional_field(*s, "seed")) {
      if (!seed->is_number_unsigned()) schema("$.settings.seed", "expected a nonnegative integer");
      spec.settings.seed = seed->get<std::uint64_t>();
    }
    if (const Json* theta = optional_field(*s, "theta")) spec.settings.theta = as_number(*theta, "$.settings.theta");
  }
  validate(spec);
  return spec;
}

StudySpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open study file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_study_text(buf.str(), std::filesystem::absolute(path).parent_path());
}

std::string render_spec(const StudySpec& spec) {
  Json root;
  Json sim;
  sim["description"] = spec.simulation.description;
  if (spec.simulation.backend) sim["backend"] = render_backend(*spec.simulation.backend);
  root["simulation"] = sim;
  root["postprocess"] = Json{{"description", spec.postprocess.description},
                             {"qoi", render_qoi(spec.postprocess.qoi)}};
  root["analysis"] = Json{{"description", spec.analysis.description}};
  Json params = Json::array();
  for (const auto& p : spec.analysis.parameters) {
    Json jp;
    jp["name"] = p.name;
    jp["lower"] = p.lower;
    jp["upper"] = p.upper;
    if (p.nominal) jp["nominal"] = *p.nominal;
    if (!p.units.empty()) jp["units"] = p.units;
    if (p.range_origin != RangeOrigin::explicit_bounds) jp["range_origin"] = std::string(to_string(p.range_origin));
    params.push_back(jp);
  }
  root["parameters"] = params;
  if (spec.goal) {
    Json g;
    g["kind"] = std::string(to_string(spec.goal->kind));
    if (spec.goal->target) g["target"] = *spec.goal->target;
    g["qoi"] = spec.goal->qoi;
    root["goal"] = g;
  }
  root["settings"] = Json{{"seed", spec.settings.seed}, {"theta", spec.settings.theta}};
  return root.dump(2) + "\n";
}

void save_spec(const StudySpec& spec, const std::filesystem::path& path) {
  write_file(path, render_spec(spec));
}

} // namespace optstudy
