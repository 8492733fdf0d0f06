#include "optstudy/workflow.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <numeric>

#include <json.hpp>

#include "optstudy/active_subspace.hpp"
#include "optstudy/csv.hpp"
#include "optstudy/digest.hpp"
#include "optstudy/error.hpp"
#include "optstudy/optimize.hpp"
#include "optstudy/sampling.hpp"
#include "optstudy/study_file.hpp"
#include "optstudy/surrogate.hpp"
#include "optstudy/svg.hpp"

namespace optstudy {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kStudyFile = "study.json";
constexpr const char* kDatasetFile = "dataset.csv";
constexpr const char* kAnalysisFile = "analysis.json";
constexpr const char* kOptimizationFile = "optimization.json";
constexpr const char* kReportDir = "report";

std::string show(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vec_from(const Json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

Json poly_to_json(const Poly1DSurrogate& p) {
  Json j;
  j["degree"] = p.degree;
  j["coeffs"] = p.coeffs;
  j["shift"] = p.shift;
  j["scale"] = p.scale;
  j["lower"] = p.lower;
  j["upper"] = p.upper;
  j["r_squared"] = p.r_squared;
  Json c = Json::array();
  for (const auto& d : p.candidates) {
    Json e;
    e["degree"] = d.degree;
    e["r_squared"] = d.r_squared;
    e["adjusted_r_squared"] = std::isnan(d.adjusted_r_squared) ? Json(nullptr) : Json(d.adjusted_r_squared);
    c.push_back(e);
  }
  j["candidates"] = c;
  return j;
}

Poly1DSurrogate poly_from_json(const Json& j) {
  Poly1DSurrogate p;
  p.degree = j.at("degree").get<int>();
  p.coeffs = j.at("coeffs").get<std::vector<double>>();
  p.shift = j.at("shift").get<double>();
  p.scale = j.at("scale").get<double>();
  p.lower = j.at("lower").get<double>();
  p.upper = j.at("upper").get<double>();
  p.r_squared = j.at("r_squared").get<double>();
  for (const auto& e : j.at("candidates")) {
    const auto& adj = e.at("adjusted_r_squared");
    p.candidates.push_back({e.at("degree").get<int>(), e.at("r_squared").get<double>(),
                            adj.is_null() ? std::nan("") : adj.get<double>()});
  }
  return p;
}

Json linear_to_json(const LinearSurrogate& m) {
  Json j;
  j["intercept"] = m.intercept;
  j["coefficients"] = to_json(m.coefficients);
  j["r_squared"] = m.r_squared;
  j["n_points"] = m.n_points;
  return j;
}

LinearSurrogate linear_from_json(const Json& j) {
  LinearSurrogate m;
  m.intercept = j.at("intercept").get<double>();
  m.coefficients = vec_from(j.at("coefficients"));
  m.r_squared = j.at("r_squared").get<double>();
  m.n_points = j.at("n_points").get<std::size_t>();
  return m;
}

Json quadratic_to_json(const QuadraticSurrogate& m) {
  Json j;
  j["intercept"] = m.intercept;
  j["linear"] = to_json(m.linear);
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.quadratic.rows(); ++i) rows.push_back(to_json(m.quadratic.row(i).transpose()));
  j["quadratic"] = rows;
  j["r_squared"] = m.r_squared;
  j["n_points"] = m.n_points;
  return j;
}

QuadraticSurrogate quadratic_from_json(const Json& j) {
  QuadraticSurrogate m;
  m.intercept = j.at("intercept").get<double>();
  m.linear = vec_from(j.at("linear"));
  const auto n = m.linear.size();
  m.quadratic.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m.quadratic.row(i) = vec_from(j.at("quadratic")[static_cast<std::size_t>(i)]).transpose();
  m.r_squared = j.at("r_squared").get<double>();
  m.n_points = j.at("n_points").get<std::size_t>();
  return m;
}

Json load_json(const fs::path& path, const char* hint) {
  if (!fs::exists(path)) fail(ErrorCode::PreconditionViolated, path.string() + " not found; " + hint);
  try {
    return Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    fail(ErrorCode::SchemaError, path.string() + ": " + e.what());
  }
}

void save_json(const fs::path& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

std::string xy_csv(const char* xname, const char* yname, const std::vector<std::pair<double, double>>& pts) {
  std::string out = format_csv_row({xname, yname});
  for (const auto& [x, y] : pts) out += format_csv_row({format_exact(x), format_exact(y)});
  return out;
}

std::vector<std::pair<double, double>> dense_curve(const Poly1DSurrogate& p) {
  std::vector<std::pair<double, double>> curve;
  const std::size_t k = kSummaryCurvePoints;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = i + 1 == k ? p.upper : p.lower + (p.upper - p.lower) * static_cast<double>(i) / static_cast<double>(k - 1);
    curve.emplace_back(x, predict(p, x));
  }
  return curve;
}

// "increasing", "decreasing" or "non-monotone" over the fitted domain.
std::string trend_of(const Poly1DSurrogate& p) {
  bool up = false, down = false;
  for (const auto& [x, y] : dense_curve(p)) {
    (void)y;
    const double d = derivative(p, x);
    if (d > 0.0) up = true;
    if (d < 0.0) down = true;
  }
  if (up && !down) return "increasing";
  if (down && !up) return "decreasing";
  if (!up && !down) return "flat";
  return "non-monotone";
}

std::string param_label(const ParameterDef& p) {
  return p.units.empty() ? p.name : p.name + " [" + p.units + "]";
}

struct Workspace {
  fs::path dir;
  StudySpec spec;
  Dataset dataset;
};

Workspace open_workspace(const fs::path& study_dir) {
  Workspace ws;
  ws.dir = study_dir;
  const fs::path spec_path = study_dir / kStudyFile;
  if (!fs::exists(spec_path))
    fail(ErrorCode::PreconditionViolated, spec_path.string() + " not found; run the study first");
  ws.spec = load_spec(spec_path);
  const fs::path data_path = study_dir / kDatasetFile;
  if (!fs::exists(data_path))
    fail(ErrorCode::PreconditionViolated, data_path.string() + " not found; run the study first");
  ws.dataset = dataset_from_csv(read_file(data_path), ws.spec.analysis.parameters, ws.spec.postprocess.qoi);
  return ws;
}

std::vector<std::string> param_names(const StudySpec& spec) {
  std::vector<std::string> names;
  for (const auto& p : spec.analysis.parameters) names.push_back(p.name);
  return names;
}

void add_if_exists(ReportBundle& b, FileRole role, const fs::path& rel) {
  if (fs::exists(b.study_dir / rel)) b.files.push_back({role, b.study_dir / rel});
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---- report text ---------------------------------------------------------

void report_header(std::string& out, const Workspace& ws) {
  const auto& spec = ws.spec;
  out += "Study report\n";
  out += "============\n\n";
  if (!spec.simulation.description.empty()) out += "Simulation: " + spec.simulation.description + "\n";
  out += "Quantity of interest: " + spec.postprocess.qoi.name + "\n";
  out += "Parameters:\n";
  for (const auto& p : spec.analysis.parameters) {
    out += "  " + param_label(p) + " in [" + show(p.lower) + ", " + show(p.upper) + "]";
    if (p.range_origin == RangeOrigin::nominal_default) out += " (default range around the nominal value)";
    out += "\n";
  }
  const auto& ds = ws.dataset;
  out += "Samples: " + std::to_string(ds.ok_count()) + " of " + std::to_string(ds.records.size()) +
         " runs succeeded\n";
  for (const auto& rec : ds.records)
    if (rec.status != RunStatus::ok)
      out += "  dropped case " + std::to_string(rec.sample_index) + ": " + std::string(to_string(rec.status)) + "\n";
  out += "\n";
}

void report_analysis_1d(std::string& out, const Workspace& ws, const Json& an) {
  const auto& p = ws.spec.analysis.parameters.front();
  const Poly1DSurrogate poly = poly_from_json(an.at("poly1d"));
  out += "Response surface\n----------------\n";
  out += "Polynomial of degree " + std::to_string(poly.degree) + " in " + p.name + ", R^2 = " + show(poly.r_squared) +
         "\n";
  out += "Degree candidates (adjusted R^2):";
  for (const auto& c : poly.candidates)
    out += " " + std::to_string(c.degree) + ": " + (std::isnan(c.adjusted_r_squared) ? std::string("n/a") : show(c.adjusted_r_squared));
  out += "\n";
  out += "Trend: " + ws.spec.postprocess.qoi.name + " is " + trend_of(poly) + " in " + p.name + " over [" +
         show(p.lower) + ", " + show(p.upper) + "].\n\n";
}

void report_analysis_nd(std::string& out, const Workspace& ws, const Json& an) {
  const auto& params = ws.spec.analysis.parameters;
  const std::string& qname = ws.spec.postprocess.qoi.name;
  const auto lin = linear_from_json(an.at("linear"));
  const auto& as = an.at("active_subspace");
  const Eigen::VectorXd w = vec_from(as.at("direction"));
  const Eigen::VectorXd lambda = vec_from(as.at("eigenvalues"));

  out += "Active subspace\n---------------\n";
  out += "Linear OLS fit: R^2 = " + show(lin.r_squared) + "\n";
  if (an.at("path") == "quadratic") {
    out += "The linear R^2 is below " + show(kQuadraticFallbackR2) +
           ", so the quadratic (QPHD) model was used: R^2 = " + show(an.at("quadratic").at("r_squared").get<double>()) +
           "\n";
  } else if (an.contains("note")) {
    out += an.at("note").get<std::string>() + "\n";
  }
  out += "Active direction:";
  for (std::size_t i = 0; i < params.size(); ++i)
    out += " " + params[i].name + " = " + show(w(static_cast<Eigen::Index>(i))) + (i + 1 < params.size() ? "," : "");
  out += "\nEigenvalues:";
  for (Eigen::Index i = 0; i < lambda.size(); ++i) out += " " + show(lambda(i));
  out += "\n";
  out += as.at("split").is_null() ? std::string("No eigenvalue gap above the ratio threshold.\n")
                                  : "Eigenvalue gap after the first " + std::to_string(as.at("split").get<std::size_t>()) +
                                        " eigenvalue(s).\n";

  std::vector<std::size_t> order(params.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(w(static_cast<Eigen::Index>(a))) > std::abs(w(static_cast<Eigen::Index>(b)));
  });
  out += "Ranking by influence (|component|):\n";
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto i = order[r];
    const double c = w(static_cast<Eigen::Index>(i));
    out += "  " + std::to_string(r + 1) + ". " + params[i].name + " (" + show(std::abs(c)) + "), " + qname + " is " +
           (c > 0.0 ? "increasing" : c < 0.0 ? "decreasing" : "flat") + " in " + params[i].name + "\n";
  }

  const auto reduced = poly_from_json(an.at("reduced").at("g"));
  out += "Reduced model g(z), z = w^T x: degree " + std::to_string(reduced.degree) + ", R^2 = " +
         show(reduced.r_squared) + "; " + qname + " is " + trend_of(reduced) + " along the active direction.\n";

  const auto& bs = an.at("bootstrap");
  if (bs.at("available").get<bool>()) {
    out += "Bootstrap (" + std::to_string(bs.at("replicates").get<std::size_t>()) + " replicates, seed " +
           std::to_string(bs.at("seed").get<std::uint64_t>()) + "), 95% intervals:\n";
    const auto& ci = bs.at("component_ci");
    for (std::size_t i = 0; i < params.size(); ++i)
      out += "  " + params[i].name + ": [" + show(ci[i][0].get<double>()) + ", " + show(ci[i][1].get<double>()) + "]\n";
    out += "  angle to the reference direction (rad): [" + show(bs.at("angle_ci")[0].get<double>()) + ", " +
           show(bs.at("angle_ci")[1].get<double>()) + "]\n";
  } else {
    out += "Bootstrap unavailable: " + bs.at("message").get<std::string>() + "\n";
  }
  out += "\n";
}

void report_optimization(std::string& out, const Workspace& ws, const Json& opt) {
  const auto& params = ws.spec.analysis.parameters;
  out += "Optimization\n------------\n";
  out += "Goal: " + opt.at("goal_description").get<std::string>() + "\n";
  out += "Method: " + opt.at("method").get<std::string>() + "\n";
  const auto& xs = opt.at("x_star");
  for (std::size_t i = 0; i < params.size(); ++i) {
    out += "Optimized " + params[i].name + ": " + show(xs[i].get<double>());
    if (!params[i].units.empty()) out += " " + params[i].units;
    out += "\n";
  }
  out += "Predicted " + ws.spec.postprocess.qoi.name + ": " + show(opt.at("predicted").get<double>()) + "\n";
  if (opt.contains("target_reached") && !opt.at("target_reached").get<bool>())
    out += "The target was not reached within tolerance; the closest point is reported.\n";
  for (const auto& w : opt.at("warnings")) out += "Warning: " + w.get<std::string>() + "\n";
  if (opt.contains("direct")) {
    const auto& d = opt.at("direct");
    out += "Full-surrogate L-BFGS-B for comparison:";
    for (std::size_t i = 0; i < params.size(); ++i)
      out += " " + params[i].name + " = " + show(d.at("x_star")[i].get<double>()) + (i + 1 < params.size() ? "," : "");
    out += "; predicted " + show(d.at("predicted").get<double>()) + "\n";
  }
  const auto& v = opt.at("validation");
  if (v.at("available").get<bool>()) {
    out += "Validation run: actual " + show(v.at("actual").get<double>()) + ", predicted " +
           show(v.at("predicted").get<double>()) + ", relative error " + show(v.at("rel_error").get<double>()) + "\n";
  } else {
    out += "Validation unavailable: " + v.at("message").get<std::string>() + "\n";
  }
}

} // namespace

std::string_view to_string(FileRole role) noexcept {
  switch (role) {
    case FileRole::dataset: return "dataset";
    case FileRole::summary_scatter: return "summary_scatter";
    case FileRole::summary_curve: return "summary_curve";
    case FileRole::component_bars: return "component_bars";
    case FileRole::models: return "models";
    case FileRole::opt_trace: return "opt_trace";
    case FileRole::report_text: return "report_text";
    case FileRole::response_svg: return "response_svg";
    case FileRole::bars_svg: return "bars_svg";
    case FileRole::manifest: return "manifest";
  }
  return "dataset";
}

const BundleFile* ReportBundle::find(FileRole role) const noexcept {
  for (const auto& f : files)
    if (f.role == role) return &f;
  return nullptr;
}

fs::path default_study_dir(const fs::path& spec_path) {
  const char* root = std::getenv(kWorkspaceEnv);
  const fs::path base = root && *root ? fs::path(root) : fs::path("workspace");
  return base / spec_path.stem();
}

RunSummary cmd_run(const fs::path& spec_path, const RunOptions& options) {
  StudySpec spec = load_spec(spec_path);
  if (options.seed) spec.settings.seed = *options.seed;
  if (options.theta) spec.settings.theta = *options.theta;
  validate(spec);
  if (!spec.simulation.backend)
    fail(ErrorCode::ValidationError, "simulation.backend is required to run a study");
  auto& backend = *spec.simulation.backend;
  // the copy in the workspace must not depend on where it is loaded from
  if (!backend.template_dir.empty()) backend.template_dir = fs::absolute(backend.template_dir).lexically_normal().string();

  RunSummary summary;
  summary.study_dir = options.study_dir ? *options.study_dir : default_study_dir(spec_path);
  fs::create_directories(summary.study_dir);
  save_spec(spec, summary.study_dir / kStudyFile);

  const auto& params = spec.analysis.parameters;
  const SamplePlan plan = plan_samples(params, spec.settings.theta, spec.settings.seed);
  write_file(summary.study_dir / "plan.csv", plan_to_csv(plan));

  BatchOptions batch;
  batch.max_workers = std::max<std::size_t>(options.workers, 1);
  summary.batch = run_batch(backend, spec.postprocess.qoi, params, plan, summary.study_dir, batch);
  return summary;
}

ReportBundle cmd_analyze(const fs::path& study_dir, const AnalyzeOptions& options) {
  const Workspace ws = open_workspace(study_dir);
  const auto& spec = ws.spec;
  const auto& ds = ws.dataset;
  const auto& params = spec.analysis.parameters;
  const std::size_t m = params.size();
  const std::size_t need = minimum_ok_rows(m);
  if (ds.ok_count() < need)
    fail(ErrorCode::InsufficientData, std::to_string(ds.ok_count()) + " usable rows, at least " + std::to_string(need) +
                                          " needed; add samples or fix failing cases");

  const fs::path report = study_dir / kReportDir;
  fs::create_directories(report);
  const std::string& qname = spec.postprocess.qoi.name;
  Json an;
  an["dimension"] = m;
  an["parameters"] = param_names(spec);
  an["qoi"] = qname;
  an["n_ok"] = ds.ok_count();
  std::string models = format_csv_row({"model", "term", "value"});

  auto with_hint = [](auto&& fn) {
    try {
      return fn();
    } catch (const StudyError& e) {
      if (e.code() == ErrorCode::RankDeficient || e.code() == ErrorCode::DuplicateAbscissae)
        fail(e.code(), std::string(e.what()) + "; add samples or widen the parameter ranges");
      throw;
    }
  };

  if (m == 1) {
    const Eigen::MatrixXd raw = ds.raw_ok();
    std::vector<double> x(raw.data(), raw.data() + raw.rows());
    std::vector<double> q(ds.Q.data(), ds.Q.data() + ds.Q.size());
    const Poly1DSurrogate poly = with_hint([&] { return fit_poly1d(x, q); });
    an["path"] = "poly1d";
    an["poly1d"] = poly_to_json(poly);

    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < x.size(); ++i) pts.emplace_back(x[i], q[i]);
    const auto curve = dense_curve(poly);
    write_file(report / "scatter.csv", xy_csv(params[0].name.c_str(), qname.c_str(), pts));
    write_file(report / "curve.csv", xy_csv(params[0].name.c_str(), qname.c_str(), curve));
    write_file(report / "response.svg",
               render_response_svg({pts, curve, param_label(params[0]), qname, qname + " vs " + params[0].name}));
    models += format_csv_row({"poly1d", "shift", format_exact(poly.shift)});
    models += format_csv_row({"poly1d", "scale", format_exact(poly.scale)});
    for (std::size_t k = 0; k < poly.coeffs.size(); ++k)
      models += format_csv_row({"poly1d", "s^" + std::to_string(k), format_exact(poly.coeffs[k])});
    models += format_csv_row({"poly1d", "r_squared", format_exact(poly.r_squared)});
  } else {
    const auto names = param_names(spec);
    const LinearSurrogate lin = with_hint([&] { return fit_ols(ds.X, ds.Q); });
    an["linear"] = linear_to_json(lin);
    models += format_csv_row({"linear", "intercept", format_exact(lin.intercept)});
    for (std::size_t i = 0; i < m; ++i)
      models += format_csv_row({"linear", names[i], format_exact(lin.coefficients(static_cast<Eigen::Index>(i)))});
    models += format_csv_row({"linear", "r_squared", format_exact(lin.r_squared)});

    ASResult as;
    an["path"] = "ols";
    if (lin.r_squared < kQuadraticFallbackR2 && ds.ok_count() >= quadratic_term_count(m)) {
      const QuadraticSurrogate quad = with_hint([&] { return fit_quadratic(ds.X, ds.Q); });
      as = active_subspace_quadratic(quad, ds.X, names);
      an["path"] = "quadratic";
      an["quadratic"] = quadratic_to_json(quad);
      models += format_csv_row({"quadratic", "intercept", format_exact(quad.intercept)});
      for (std::size_t i = 0; i < m; ++i)
        models += format_csv_row({"quadratic", names[i], format_exact(quad.linear(static_cast<Eigen::Index>(i)))});
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j)
          models += format_csv_row({"quadratic", names[i] + "*" + names[j],
                                    format_exact(quad.quadratic(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))});
      models += format_csv_row({"quadratic", "r_squared", format_exact(quad.r_squared)});
    } else {
      if (lin.r_squared < kQuadraticFallbackR2)
        an["note"] = "The linear R^2 is below " + show(kQuadraticFallbackR2) + " but " + std::to_string(ds.ok_count()) +
                     " rows are too few for the quadratic model (" + std::to_string(quadratic_term_count(m)) +
                     " needed); the linear direction is kept.";
      as = active_direction_ols(lin, names);
    }
    Json asj;
    asj["source"] = std::string(to_string(as.source));
    asj["direction"] = to_json(as.direction);
    asj["eigenvalues"] = to_json(as.eigenvalues);
    asj["split"] = as.split ? Json(*as.split) : Json(nullptr);
    an["active_subspace"] = asj;

    const std::uint64_t seed = options.seed.value_or(spec.settings.seed);
    Json bs;
    try {
      const BootstrapReport rep = bootstrap_direction(ds.X, ds.Q, options.bootstrap_replicates, seed);
      bs["available"] = true;
      bs["replicates"] = rep.replicates;
      bs["seed"] = rep.seed;
      Json ci = Json::array();
      for (const auto& [lo, hi] : rep.component_ci) ci.push_back({lo, hi});
      bs["component_ci"] = ci;
      bs["angle_ci"] = {rep.angle_ci.first, rep.angle_ci.second};
      bs["rank_deficient_draws"] = rep.rank_deficient_draws;
    } catch (const StudyError& e) {
      if (e.code() != ErrorCode::BootstrapDegenerate && e.code() != ErrorCode::RankDeficient &&
          e.code() != ErrorCode::ZeroGradient)
        throw;
      bs["available"] = false;
      bs["message"] = e.what();
    }
    an["bootstrap"] = bs;

    const ReducedModel red = with_hint([&] { return build_reduced_model(ds.X, ds.Q, as.direction); });
    Json rj;
    rj["g"] = poly_to_json(red.g);
    rj["r_squared"] = red.r_squared;
    an["reduced"] = rj;
    models += format_csv_row({"reduced", "shift", format_exact(red.g.shift)});
    models += format_csv_row({"reduced", "scale", format_exact(red.g.scale)});
    for (std::size_t k = 0; k < red.g.coeffs.size(); ++k)
      models += format_csv_row({"reduced", "s^" + std::to_string(k), format_exact(red.g.coeffs[k])});
    models += format_csv_row({"reduced", "r_squared", format_exact(red.r_squared)});

    const SummaryPlotData sd = summary_data(ds.X, ds.Q, as.direction, red.g, names);
    write_file(report / "scatter.csv", xy_csv("z", qname.c_str(), sd.points));
    write_file(report / "curve.csv", xy_csv("z", qname.c_str(), sd.curve));
    std::string bars = format_csv_row({"parameter", "component"});
    for (const auto& [name, c] : sd.component_bars) bars += format_csv_row({name, format_exact(c)});
    write_file(report / "bars.csv", bars);
    write_file(report / "response.svg",
               render_response_svg({sd.points, sd.curve, "active variable z = w^T x", qname, "Summary plot: " + qname}));
    write_file(report / "bars.svg", render_bars_svg({sd.component_bars, "active direction component",
                                                     "Active direction components"}));
  }
  write_file(report / "models.csv", models);
  save_json(study_dir / kAnalysisFile, an);
  // a fresh analysis invalidates an older optimization
  fs::remove(study_dir / kOptimizationFile);
  fs::remove(report / "opt_trace.csv");
  return cmd_report(study_dir);
}

ReportBundle cmd_optimize(const fs::path& study_dir) {
  const Workspace ws = open_workspace(study_dir);
  const auto& spec = ws.spec;
  const auto& params = spec.analysis.parameters;
  const std::size_t m = params.size();
  if (!spec.goal) fail(ErrorCode::MissingGoal, "the study has no goal; add a goal section to the study file");
  const GoalSpec& goal = *spec.goal;
  const Json an = load_json(study_dir / kAnalysisFile, "run analyze first");

  Json opt;
  opt["goal"] = std::string(to_string(goal.kind));
  opt["target"] = goal.target ? Json(*goal.target) : Json(nullptr);
  std::string desc = std::string(to_string(goal.kind)) + " " + spec.postprocess.qoi.name;
  if (goal.target) desc += " (target " + show(*goal.target) + ")";
  opt["goal_description"] = desc;

  OptResult res;
  Eigen::VectorXd x_raw;
  double predicted = 0.0;
  Json warnings = Json::array();

  if (m == 1) {
    const Poly1DSurrogate poly = poly_from_json(an.at("poly1d"));
    if (goal.kind == GoalKind::min_input_at_target) {
      if (!goal.target) fail(ErrorCode::MissingTarget, "min_input_at_target needs a target");
      const TargetCrossing tc = min_input_at_target(poly, *goal.target);
      opt["method"] = "dense scan with bisection refinement";
      opt["target_reached"] = tc.reached;
      x_raw = Eigen::VectorXd::Constant(1, tc.x);
      predicted = tc.value;
      res.x_star = x_raw;
      res.objective_value = std::abs(tc.value - *goal.target);
      res.termination = Termination::interval_tol;
    } else {
      const Objective obj = compile_objective(goal, Surrogate{poly}, Eigen::VectorXd::Constant(1, poly.lower),
                                              Eigen::VectorXd::Constant(1, poly.upper));
      res = minimize_scalar_bounded([&](double v) { return obj.eval(Eigen::VectorXd::Constant(1, v)); }, poly.lower,
                                    poly.upper);
      opt["method"] = "bounded scalar minimization on the response surface";
      x_raw = res.x_star;
      predicted = predict(poly, x_raw(0));
    }
  } else {
    if (goal.kind == GoalKind::min_input_at_target)
      fail(ErrorCode::UnsupportedGoal, "min_input_at_target needs a single-parameter study");
    const auto names = param_names(spec);
    ASResult as;
    as.direction = vec_from(an.at("active_subspace").at("direction"));
    as.param_names = names;
    ReducedModel red;
    red.g = poly_from_json(an.at("reduced").at("g"));
    red.r_squared = red.g.r_squared;
    res = optimize_reduced(red, as, goal, params);
    opt["method"] = "bounded scalar minimization on the reduced model g(z)";
    opt["z_star"] = *res.z_star;
    opt["clamped"] = res.clamped;
    x_raw = res.x_star;
    predicted = res.f_star;

    Surrogate full = an.at("path") == "quadratic" ? Surrogate{quadratic_from_json(an.at("quadratic"))}
                                                  : Surrogate{linear_from_json(an.at("linear"))};
    const Objective obj = compile_objective(goal, full, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m)),
                                            Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m)));
    const OptResult direct = minimize_lbfgsb(obj, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m), 0.5));
    Json dj;
    dj["x_star"] = to_json(denormalize_point(params, direct.x_star));
    dj["predicted"] = predict(full, direct.x_star);
    dj["objective"] = direct.objective_value;
    dj["iterations"] = direct.iterations;
    dj["termination"] = std::string(to_string(direct.termination));
    opt["direct"] = dj;
  }
  for (const auto& w : res.warnings) warnings.push_back(w);

  opt["x_star"] = to_json(x_raw);
  opt["predicted"] = predicted;
  opt["objective"] = res.objective_value;
  opt["iterations"] = res.iterations;
  opt["termination"] = std::string(to_string(res.termination));
  opt["warnings"] = warnings;

  Json vj;
  if (spec.simulation.backend) {
    const ValidationReport v = validate_optimum(*spec.simulation.backend, spec.postprocess.qoi, params, x_raw,
                                                predicted, study_dir / "cases" / "validation");
    vj["available"] = v.available;
    vj["actual"] = v.available ? Json(v.actual) : Json(nullptr);
    vj["predicted"] = v.predicted;
    vj["rel_error"] = v.available ? Json(v.rel_error) : Json(nullptr);
    vj["message"] = v.message;
  } else {
    vj["available"] = false;
    vj["message"] = "no backend configured";
  }
  opt["validation"] = vj;

  const fs::path report = study_dir / kReportDir;
  fs::create_directories(report);
  std::string trace = format_csv_row({"iteration", "objective", "progress"});
  for (std::size_t i = 0; i < res.trace.size(); ++i)
    trace += format_csv_row({std::to_string(i), format_exact(res.trace[i].objective), format_exact(res.trace[i].progress)});
  write_file(report / "opt_trace.csv", trace);
  save_json(study_dir / kOptimizationFile, opt);
  return cmd_report(study_dir);
}

ReportBundle cmd_report(const fs::path& study_dir) {
  const Workspace ws = open_workspace(study_dir);
  const Json an = load_json(study_dir / kAnalysisFile, "run analyze first");
  std::string text;
  report_header(text, ws);
  if (ws.spec.dimension() == 1) report_analysis_1d(text, ws, an);
  else report_analysis_nd(text, ws, an);
  if (fs::exists(study_dir / kOptimizationFile))
    report_optimization(text, ws, load_json(study_dir / kOptimizationFile, "run optimize first"));

  const fs::path report = study_dir / kReportDir;
  fs::create_directories(report);
  write_file(report / "report.txt", text);

  ReportBundle bundle;
  bundle.study_dir = study_dir;
  add_if_exists(bundle, FileRole::dataset, kDatasetFile);
  add_if_exists(bundle, FileRole::summary_scatter, fs::path(kReportDir) / "scatter.csv");
  add_if_exists(bundle, FileRole::summary_curve, fs::path(kReportDir) / "curve.csv");
  add_if_exists(bundle, FileRole::component_bars, fs::path(kReportDir) / "bars.csv");
  add_if_exists(bundle, FileRole::models, fs::path(kReportDir) / "models.csv");
  add_if_exists(bundle, FileRole::opt_trace, fs::path(kReportDir) / "opt_trace.csv");
  add_if_exists(bundle, FileRole::report_text, fs::path(kReportDir) / "report.txt");
  add_if_exists(bundle, FileRole::response_svg, fs::path(kReportDir) / "response.svg");
  add_if_exists(bundle, FileRole::bars_svg, fs::path(kReportDir) / "bars.svg");

  Json files = Json::array();
  for (const auto& f : bundle.files) {
    Json e;
    e["role"] = std::string(to_string(f.role));
    e["path"] = fs::relative(f.path, study_dir).generic_string();
    e["sha256"] = sha256_file(f.path);
    e["bytes"] = fs::file_size(f.path);
    files.push_back(e);
  }
  Json manifest;
  manifest["files"] = files;
  manifest["metadata"] = {{"generated_at", utc_timestamp()}};
  const fs::path manifest_path = report / "manifest.json";
  save_json(manifest_path, manifest);
  bundle.files.push_back({FileRole::manifest, manifest_path});
  return bundle;
}

} // namespace optstudy
