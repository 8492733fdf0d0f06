#include <cstdio>
#include <fstream>
#include <regex>
#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "optstudy/digest.hpp"
#include "optstudy/error.hpp"
#include "optstudy/svg.hpp"
#include "optstudy/workflow.hpp"
#include "paths.hpp"

using namespace optstudy;
using optstudy::testing::ScratchDir;
namespace fs = std::filesystem;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

// Writes a study file with an analytic backend into `dir` and returns its path.
fs::path write_study(const fs::path& dir, const std::string& stem, const nlohmann::json& backend,
                     const nlohmann::json& params, const nlohmann::json& goal, double theta, std::uint64_t seed = 5) {
  nlohmann::json j;
  j["simulation"] = {{"description", "synthetic"}, {"backend", backend}};
  j["postprocess"] = {{"description", "q"}, {"qoi", {{"name", "q"}, {"extraction", {{"mode", "backend_direct"}}}}}};
  j["parameters"] = params;
  if (!goal.is_null()) j["goal"] = goal;
  j["settings"] = {{"seed", seed}, {"theta", theta}};
  const fs::path p = dir / (stem + ".json");
  std::ofstream(p) << j.dump(2);
  return p;
}

nlohmann::json analytic(const std::string& name, const nlohmann::json& params) {
  return {{"kind", "analytic"}, {"analytic_name", name}, {"analytic_params", params}};
}

nlohmann::json unit_params(std::size_t m) {
  auto a = nlohmann::json::array();
  for (std::size_t i = 0; i < m; ++i) a.push_back({{"name", "p" + std::to_string(i + 1)}, {"lower", 0.0}, {"upper", 1.0}});
  return a;
}

std::string report_text(const fs::path& study_dir) { return read_file(study_dir / "report/report.txt"); }

struct CliResult {
  int status = -1;
  std::string out;
};

CliResult cli(const std::string& args) {
  const std::string cmd = std::string(OPTSTUDY_CLI_PATH) + " " + args + " 2>&1";
  CliResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

} // namespace

TEST(Svg, ResponseElementCounts) {
  ResponsePlot plot;
  for (int i = 0; i < 8; ++i) plot.samples.emplace_back(i, i * i);
  for (int i = 0; i <= 50; ++i) plot.curve.emplace_back(i * 0.14, i * i * 0.0196);
  plot.x_label = "inlet velocity [m/s]";
  plot.y_label = "max yPlus";
  plot.title = "a < b & c";
  const auto svg = render_response_svg(plot);
  EXPECT_EQ(count(svg, "<circle"), 8u);
  EXPECT_EQ(count(svg, "<polyline"), 1u);
  EXPECT_NE(svg.find("inlet velocity [m/s]"), std::string::npos);
  EXPECT_NE(svg.find("a &lt; b &amp; c"), std::string::npos);
  EXPECT_EQ(svg, render_response_svg(plot));
  EXPECT_EQ(svg.rfind("<svg", 0) == 0 || svg.rfind("<?xml", 0) == 0, true);
}

TEST(Svg, BarHeightsFollowMagnitudes) {
  BarPlot plot;
  plot.bars = {{"velocity", 0.9}, {"k", -0.3}};
  const auto svg = render_bars_svg(plot);
  EXPECT_EQ(count(svg, "<rect"), 2u);
  std::regex height(R"(<rect[^>]*height="([0-9.]+)\")");
  std::vector<double> h;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), height); it != std::sregex_iterator(); ++it)
    h.push_back(std::stod((*it)[1]));
  ASSERT_EQ(h.size(), 2u);
  EXPECT_NEAR(h[0] / h[1], 3.0, 0.02);
  EXPECT_EQ(svg, render_bars_svg(plot));
}

TEST(Workflow, FourParameterRanking) {
  ScratchDir tmp("rank4");
  const auto spec = write_study(tmp.path(), "rank4", analytic("linear", {{"b0", 1.0}, {"b1", 0.05}, {"b2", 0.02}, {"b3", 0.01}}),
                                unit_params(4), nullptr, 8.0);
  const auto run = cmd_run(spec, {.study_dir = tmp / "study"});
  EXPECT_EQ(run.batch.dataset.ok_count(), 32u);
  const auto bundle = cmd_analyze(tmp / "study", {.bootstrap_replicates = 50});
  ASSERT_NE(bundle.find(FileRole::component_bars), nullptr);
  ASSERT_NE(bundle.find(FileRole::manifest), nullptr);
  const auto text = report_text(tmp / "study");
  EXPECT_NE(text.find("  1. p1 ("), std::string::npos) << text;
  EXPECT_NE(text.find("  2. p2 ("), std::string::npos);
  EXPECT_NE(text.find("  3. p3 ("), std::string::npos);
  EXPECT_NE(text.find("  4. p4 ("), std::string::npos);
  const auto an = nlohmann::json::parse(read_file(tmp / "study/analysis.json"));
  EXPECT_GE(an["active_subspace"]["direction"][0].get<double>(), 0.99);
  EXPECT_EQ(an["path"], "ols");
}

TEST(Workflow, OneDimensionalTrendWords) {
  ScratchDir tmp("trend");
  auto params = nlohmann::json::array({{{"name", "v"}, {"lower", 8.0}, {"upper", 12.0}, {"units", "m/s"}}});
  const auto up = write_study(tmp.path(), "up", analytic("linear", {{"b0", 2.0}}), params, nullptr, 5.0);
  const auto down = write_study(tmp.path(), "down", analytic("linear", {{"b0", -2.0}}), params, nullptr, 5.0);
  cmd_run(up, {.study_dir = tmp / "up"});
  cmd_run(down, {.study_dir = tmp / "down"});
  cmd_analyze(tmp / "up");
  cmd_analyze(tmp / "down");
  EXPECT_NE(report_text(tmp / "up").find("q is increasing in v"), std::string::npos);
  EXPECT_NE(report_text(tmp / "down").find("q is decreasing in v"), std::string::npos);
  EXPECT_NE(report_text(tmp / "up").find("v [m/s] in [8, 12]"), std::string::npos);
  EXPECT_TRUE(fs::exists(tmp / "up/report/response.svg"));
}

TEST(Workflow, QuadraticFallbackWhenLinearFitIsPoor) {
  ScratchDir tmp("qphd");
  // symmetric bowl: linear R^2 is far below 0.9
  const auto spec = write_study(tmp.path(), "bowl", analytic("quadratic", {{"h0", 1.0}, {"h1", 0.2}}), unit_params(2),
                                nullptr, 10.0, 11);
  cmd_run(spec, {.study_dir = tmp / "study"});
  cmd_analyze(tmp / "study", {.bootstrap_replicates = 20});
  const auto an = nlohmann::json::parse(read_file(tmp / "study/analysis.json"));
  ASSERT_LT(an["linear"]["r_squared"].get<double>(), 0.9);
  EXPECT_EQ(an["path"], "quadratic");
  EXPECT_NE(report_text(tmp / "study").find("quadratic (QPHD) model was used"), std::string::npos);
  EXPECT_GT(std::abs(an["active_subspace"]["direction"][0].get<double>()), 0.9);
}

TEST(Workflow, OptimizeWritesOptimizedLines) {
  ScratchDir tmp("optline");
  auto params = nlohmann::json::array({{{"name", "inlet_velocity"}, {"lower", 10.0}, {"upper", 60.0}, {"units", "m/s"}}});
  const auto spec = write_study(tmp.path(), "lin", analytic("linear", {{"c", 5.0}, {"b0", 3.0}}), params,
                                {{"kind", "minimize"}}, 5.0);
  cmd_run(spec, {.study_dir = tmp / "study"});
  cmd_analyze(tmp / "study");
  const auto bundle = cmd_optimize(tmp / "study");
  ASSERT_NE(bundle.find(FileRole::opt_trace), nullptr);
  const auto text = report_text(tmp / "study");
  EXPECT_NE(text.find("Optimized inlet_velocity: 10 m/s\n"), std::string::npos) << text;
  EXPECT_NE(text.find("Validation run: actual 5"), std::string::npos);
}

TEST(Workflow, MissingGoalIsAClearError) {
  ScratchDir tmp("nogoal");
  const auto spec = write_study(tmp.path(), "nogoal", analytic("linear", nlohmann::json::object()), unit_params(1), nullptr, 5.0);
  cmd_run(spec, {.study_dir = tmp / "study"});
  cmd_analyze(tmp / "study");
  try {
    cmd_optimize(tmp / "study");
    FAIL();
  } catch (const StudyError& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingGoal);
    EXPECT_NE(std::string(e.what()).find("goal"), std::string::npos);
  }
}

TEST(Workflow, ManifestDigestsMatchFiles) {
  ScratchDir tmp("manifest");
  const auto spec = write_study(tmp.path(), "m", analytic("explinear", {{"a0", 0.7}, {"a1", 0.3}}), unit_params(2),
                                {{"kind", "maximize"}}, 4.0);
  cmd_run(spec, {.study_dir = tmp / "study"});
  cmd_analyze(tmp / "study", {.bootstrap_replicates = 20});
  cmd_optimize(tmp / "study");
  const auto manifest = nlohmann::json::parse(read_file(tmp / "study/report/manifest.json"));
  ASSERT_TRUE(manifest.contains("files"));
  ASSERT_GE(manifest["files"].size(), 6u);
  for (const auto& f : manifest["files"]) {
    const fs::path p = tmp / "study" / f["path"].get<std::string>();
    EXPECT_EQ(sha256_file(p), f["sha256"].get<std::string>()) << p;
  }
  EXPECT_TRUE(manifest["metadata"].contains("generated_at"));
}

TEST(Cli, ParsePrintsAStudyFile) {
  const auto r = cli("parse \"Please help me analyze the effect of the inlet velocity (from 8 to 12 m/s) on max yPlus in "
                     "the simulation: pitzDaily\"");
  ASSERT_EQ(r.status, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["parameters"][0]["lower"], 8.0);
  EXPECT_EQ(j["parameters"][0]["upper"], 12.0);
  EXPECT_EQ(cli("parse \"make me a sandwich\"").status, 2);
}

TEST(Cli, ExitCodesAndResume) {
  ScratchDir tmp("cli");
  const auto ok = write_study(tmp.path(), "ok", analytic("linear", {{"b0", 1.0}}), unit_params(2), {{"kind", "minimize"}}, 4.0);
  const auto first = cli("run " + ok.string() + " --out " + (tmp / "study").string());
  ASSERT_EQ(first.status, 0) << first.out;
  EXPECT_NE(first.out.find("evaluated 8, reused 0"), std::string::npos) << first.out;
  const auto second = cli("run " + ok.string() + " --out " + (tmp / "study").string());
  EXPECT_NE(second.out.find("evaluated 0, reused 8"), std::string::npos) << second.out;
  EXPECT_EQ(cli("analyze " + (tmp / "study").string()).status, 0);
  EXPECT_EQ(cli("optimize " + (tmp / "study").string()).status, 0);
  EXPECT_EQ(cli("report " + (tmp / "study").string()).status, 0);

  // every case fails: insufficient data
  auto bad_backend = nlohmann::json{{"kind", "process_template"},
                                    {"template_dir", (tmp / "tpl").string()},
                                    {"run_command", {"sh", "-c", "exit 3"}},
                                    {"timeout", 10.0}};
  fs::create_directories(tmp / "tpl");
  std::ofstream(tmp / "tpl/in") << "@{p1}\n";
  const auto bad = write_study(tmp.path(), "bad", bad_backend, unit_params(1), nullptr, 5.0);
  const auto failed = cli("run " + bad.string() + " --out " + (tmp / "bad").string());
  EXPECT_EQ(failed.status, 4) << failed.out;
  EXPECT_NE(failed.out.find("InsufficientData"), std::string::npos) << failed.out;

  std::ofstream(tmp / "broken.json") << R"({"simulation": {}, "unexpected": 1})";
  EXPECT_EQ(cli("run " + (tmp / "broken.json").string()).status, 2);
}
