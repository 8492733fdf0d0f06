#include "optstudy/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <regex>

#include "optstudy/csv.hpp"
#include "optstudy/error.hpp"
#include "optstudy/sampling.hpp"

namespace optstudy {

namespace {

constexpr auto kIcase = std::regex::ECMAScript | std::regex::icase;

// Numbers may be wrapped in TeX math, e.g. "$1e-04$".
const std::string kNumber = R"(\$?\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*\$?)";

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  bool space = false;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      space = true;
    } else {
      if (space && !out.empty()) out.push_back(' ');
      space = false;
      out.push_back(ch);
    }
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto* ws = " \t,.;:";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::string strip_article(std::string s) {
  static const std::regex article(R"(^\s*(?:the|a|an)\s+)", kIcase);
  return std::regex_replace(s, article, "", std::regex_constants::format_first_only);
}

double to_number(const std::string& text) {
  double v = 0.0;
  if (!parse_double(text, v)) fail(ErrorCode::UnrecognizedTemplate, "bad number '" + text + "'");
  return v;
}

std::string clean_units(std::string_view s) {
  std::string out;
  for (char ch : s)
    if (ch != '$') out.push_back(ch);
  return trim(out);
}

// Splits "a, b and c" into items. "between X and Y" stays one item.
std::vector<std::string> split_items(const std::string& text) {
  static const std::regex sep(R"(\s*,\s*(?:and\s+)?|\s+and\s+)", kIcase);
  static const std::regex between(R"(\bbetween\b)", kIcase);
  std::vector<std::string> items;
  std::string current;
  bool pending_between = false;
  auto begin = std::sregex_iterator(text.begin(), text.end(), sep);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const std::string piece = text.substr(last, static_cast<std::size_t>(m.position()) - last);
    current += piece;
    if (std::regex_search(piece, between)) pending_between = true;
    const bool is_and = m.str().find(',') == std::string::npos;
    if (is_and && pending_between) {
      current += m.str();
      pending_between = false;
    } else {
      items.push_back(current);
      current.clear();
      pending_between = false;
    }
    last = static_cast<std::size_t>(m.position() + m.length());
  }
  current += text.substr(last);
  items.push_back(current);
  std::vector<std::string> out;
  for (auto& item : items) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::string identifier_or_fail(const std::string& phrase, const char* what) {
  auto id = to_identifier(strip_article(trim(phrase)));
  if (id.empty())
    fail(ErrorCode::UnrecognizedTemplate, std::string("empty ") + what + " in prompt");
  return id;
}

ParameterDef parameter_without_range(const std::string& phrase, const PromptOptions& options) {
  ParameterDef p;
  p.name = identifier_or_fail(phrase, "parameter name");
  double nominal = 1.0;
  if (auto it = options.nominals.find(p.name); it != options.nominals.end()) nominal = it->second;
  auto [lo, hi] = default_range(nominal);
  p.lower = lo;
  p.upper = hi;
  p.nominal = nominal;
  p.range_origin = RangeOrigin::nominal_default;
  return p;
}

std::string qoi_phrase(const std::string& text) {
  static const std::regex stop(R"(\s*(?:[,(:]|\.(?:\s|$)|\s+at latest time\b))", kIcase);
  std::smatch m;
  std::string head = text;
  if (std::regex_search(text, m, stop)) head = text.substr(0, static_cast<std::size_t>(m.position()));
  return head;
}

struct AnalysisClause {
  std::vector<ParameterDef> parameters;
  std::string qoi;
};

AnalysisClause parse_analysis(const std::string& body, const PromptOptions& options) {
  static const std::regex range(
      R"(\(\s*from\s+)" + kNumber + R"(\s*([^()]*?)\s+to\s+)" + kNumber + R"(\s*([^()]*?)\s*\))",
      kIcase);
  static const std::regex on_word(R"(\s+on\s+)", kIcase);

  std::vector<std::smatch> ranges;
  for (auto it = std::sregex_iterator(body.begin(), body.end(), range);
       it != std::sregex_iterator(); ++it)
    ranges.push_back(*it);

  const std::size_t search_from =
      ranges.empty() ? 0 : static_cast<std::size_t>(ranges.back().position() + ranges.back().length());
  std::smatch on_match;
  const std::string tail = body.substr(search_from);
  if (!std::regex_search(tail, on_match, on_word))
    fail(ErrorCode::UnrecognizedTemplate, "analysis clause lacks 'on <quantity>'");
  const std::size_t on_pos = search_from + static_cast<std::size_t>(on_match.position());
  const std::string qoi_text = body.substr(on_pos + static_cast<std::size_t>(on_match.length()));

  AnalysisClause clause;
  std::size_t cursor = 0;
  for (const auto& m : ranges) {
    const auto start = static_cast<std::size_t>(m.position());
    if (start >= on_pos) break;
    std::string chunk = body.substr(cursor, start - cursor);
    static const std::regex lead(R"(^\s*(?:,\s*)?(?:and\s+)?)", kIcase);
    chunk = std::regex_replace(chunk, lead, "", std::regex_constants::format_first_only);
    ParameterDef p;
    p.name = identifier_or_fail(chunk, "parameter name");
    p.lower = to_number(m[1].str());
    p.upper = to_number(m[3].str());
    if (!(p.lower < p.upper))
      fail(ErrorCode::MalformedRange,
           "parameter '" + p.name + "': range start " + m[1].str() + " is not below " + m[3].str());
    p.units = clean_units(m[4].str());
    if (p.units.empty()) p.units = clean_units(m[2].str());
    p.range_origin = RangeOrigin::explicit_bounds;
    clause.parameters.push_back(std::move(p));
    cursor = start + static_cast<std::size_t>(m.length());
  }
  if (cursor < on_pos) {
    for (const auto& item : split_items(body.substr(cursor, on_pos - cursor)))
      clause.parameters.push_back(parameter_without_range(item, options));
  }
  if (clause.parameters.empty())
    fail(ErrorCode::UnrecognizedTemplate, "analysis clause names no parameter");
  clause.qoi = identifier_or_fail(qoi_phrase(qoi_text), "quantity of interest");
  return clause;
}

struct OptimizationClause {
  std::vector<std::string> inputs;
  std::string qoi;
  GoalSpec goal;
};

std::optional<double> first_number(const std::string& text) {
  static const std::regex num(R"((?:^|[^\w.{])\$?([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?))");
  std::smatch m;
  if (!std::regex_search(text, m, num)) return std::nullopt;
  return to_number(m[1].str());
}

OptimizationClause parse_optimization(const std::string& body) {
  // body starts right after "determine the "
  static const std::regex extremum(
      R"(^(?:optimal\s+)?(.+?)\s+(?:that|which)\s+(minimi[sz]es|maximi[sz]es)\s+(.+)$)", kIcase);
  static const std::regex at_which(
      R"(^(?:(optimal|minimum|min)\s+)?(.+?)\s+(?:at which|where|such that|for which)\s+(.+?)\s+(?:is|should be|becomes)\s+(.+)$)",
      kIcase);
  OptimizationClause clause;
  std::smatch m;
  if (std::regex_match(body, m, extremum)) {
    clause.inputs = split_items(m[1].str());
    clause.qoi = identifier_or_fail(qoi_phrase(m[3].str()), "quantity of interest");
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(m[2].str()[1])));
    clause.goal.kind = c == 'i' ? GoalKind::minimize : GoalKind::maximize;
    clause.goal.qoi = clause.qoi;
    return clause;
  }
  if (!std::regex_match(body, m, at_which))
    fail(ErrorCode::UnrecognizedTemplate, "optimization clause not of the form "
                                          "'determine the optimal <P> at which <Q> is near <T>'");
  std::string mode = m[1].str();
  std::transform(mode.begin(), mode.end(), mode.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  clause.inputs = split_items(m[2].str());
  clause.qoi = identifier_or_fail(m[3].str(), "quantity of interest");
  const std::string condition = m[4].str();

  static const std::regex near_re(R"(^(?:near|close to|as close to|around|approximately|equal to)\b)", kIcase);
  // "blow" is a misspelling that occurs in real prompts.
  static const std::regex below_re(R"(^(?:below|blow|under|less than|lower than)\b)", kIcase);
  GoalKind kind;
  if (std::regex_search(condition, near_re)) {
    kind = GoalKind::target;
  } else if (std::regex_search(condition, below_re)) {
    kind = GoalKind::below;
  } else {
    fail(ErrorCode::UnrecognizedTemplate, "goal condition '" + condition + "' is not near/below");
  }
  if (mode == "min" || mode == "minimum") kind = GoalKind::min_input_at_target;
  auto target = first_number(condition);
  if (!target) fail(ErrorCode::MissingTarget, "goal '" + condition + "' has no numeric target");
  clause.goal.kind = kind;
  clause.goal.target = *target;
  clause.goal.qoi = clause.qoi;
  return clause;
}

} // namespace

StudySpec parse_prompt(std::string_view raw_text, const PromptOptions& options) {
  std::string text = collapse_whitespace(raw_text);
  if (text.empty()) fail(ErrorCode::UnrecognizedTemplate, "empty prompt");

  StudySpec spec;
  spec.settings.seed = options.seed;
  spec.settings.theta = options.theta;

  static const std::regex sim_split(R"(\s+in (?:a|the) simulation\b\s*[:,.]?\s*)", kIcase);
  std::smatch sim;
  if (std::regex_search(text, sim, sim_split)) {
    spec.simulation.description = trim(sim.suffix().str());
    text = text.substr(0, static_cast<std::size_t>(sim.position()));
  }

  static const std::regex analysis_re(R"(\banaly[sz]e the effects? of\b\s*)", kIcase);
  static const std::regex optimize_re(R"((?:\s+and)?\s*\bdetermine the\s+)", kIcase);

  std::smatch am;
  std::smatch om;
  const bool has_analysis = std::regex_search(text, am, analysis_re);
  const bool has_opt = std::regex_search(text, om, optimize_re);
  if (!has_analysis && !has_opt)
    fail(ErrorCode::UnrecognizedTemplate, "prompt matches neither the analysis nor the "
                                          "optimization template");

  std::optional<OptimizationClause> opt;
  std::size_t analysis_end = text.size();
  if (has_opt) {
    const auto opt_pos = static_cast<std::size_t>(om.position());
    if (has_analysis && opt_pos < static_cast<std::size_t>(am.position()))
      fail(ErrorCode::UnrecognizedTemplate, "optimization clause must follow the analysis clause");
    analysis_end = opt_pos;
    opt = parse_optimization(trim(om.suffix().str()));
  }

  if (has_analysis) {
    const auto begin = static_cast<std::size_t>(am.position() + am.length());
    const std::string body = begin < analysis_end ? text.substr(begin, analysis_end - begin) : "";
    auto clause = parse_analysis(trim(body), options);
    spec.analysis.description = trim(text.substr(static_cast<std::size_t>(am.position()),
                                                 analysis_end - static_cast<std::size_t>(am.position())));
    spec.analysis.parameters = std::move(clause.parameters);
    spec.postprocess.qoi.name = clause.qoi;
  } else {
    for (const auto& item : opt->inputs)
      spec.analysis.parameters.push_back(parameter_without_range(item, options));
    spec.postprocess.qoi.name = opt->qoi;
    spec.analysis.description = "analyze the effect of the optimization inputs";
  }
  spec.postprocess.qoi.extraction = BackendDirect{};
  spec.postprocess.description = "extract " + spec.postprocess.qoi.name + " at latest time";

  if (opt) {
    opt->goal.qoi = spec.postprocess.qoi.name;
    spec.goal = opt->goal;
  }
  validate(spec);
  return spec;
}

std::string render_prompt(const StudySpec& spec) {
  std::string out = "analyze the effect of ";
  const auto& params = spec.analysis.parameters;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i > 0) out += (i + 1 == params.size()) ? " and " : ", ";
    const auto& p = params[i];
    out += p.name + " (from " + format_exact(p.lower) + " to " + format_exact(p.upper);
    if (!p.units.empty()) out += " " + p.units;
    out += ")";
  }
  const std::string& q = spec.postprocess.qoi.name;
  out += " on " + q;
  if (spec.goal) {
    const auto& g = *spec.goal;
    std::string inputs;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (i > 0) inputs += (i + 1 == params.size()) ? " and " : ", ";
      inputs += params[i].name;
    }
    switch (g.kind) {
      case GoalKind::minimize:
        out += " and determine the optimal " + inputs + " that minimizes " + q;
        break;
      case GoalKind::maximize:
        out += " and determine the optimal " + inputs + " that maximizes " + q;
        break;
      case GoalKind::target:
        out += " and determine the optimal " + inputs + " at which " + q + " is near " +
               format_exact(*g.target);
        break;
      case GoalKind::below:
        out += " and determine the optimal " + inputs + " at which " + q + " is below " +
               format_exact(*g.target);
        break;
      case GoalKind::min_input_at_target:
        out += " and determine the min " + inputs + " at which " + q + " is near " +
               format_exact(*g.target);
        break;
    }
  }
  return out;
}

} // namespace optstudy
