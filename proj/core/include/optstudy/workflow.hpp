#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "optstudy/backend.hpp"
#include "optstudy/study.hpp"

namespace optstudy {

// Workspace layout under a study directory:
//   study.json              validated spec the study was run with
//   plan.csv                sample plan, raw units
//   ledger.ndjson           append-only run log
//   dataset.csv             index, params..., qoi, status
//   cases/<i>/              process-backend case trees
//   analysis.json           fitted models (input to optimize)
//   optimization.json
//   report/                 CSV + SVG + report.txt + manifest.json
inline constexpr const char* kWorkspaceEnv = "OPTSTUDY_WORKSPACE";

enum class FileRole {
  dataset,
  summary_scatter,
  summary_curve,
  component_bars,
  models,
  opt_trace,
  report_text,
  response_svg,
  bars_svg,
  manifest,
};

std::string_view to_string(FileRole role) noexcept;

struct BundleFile {
  FileRole role;
  std::filesystem::path path;
};

struct ReportBundle {
  std::filesystem::path study_dir;
  std::vector<BundleFile> files;

  const BundleFile* find(FileRole role) const noexcept;
};

struct RunOptions {
  std::size_t workers = 1;
  std::optional<std::uint64_t> seed;
  std::optional<double> theta;
  std::optional<std::filesystem::path> study_dir;
};

// Default study directory: $OPTSTUDY_WORKSPACE/<spec stem>, or
// ./workspace/<spec stem> when the variable is unset.
std::filesystem::path default_study_dir(const std::filesystem::path& spec_path);

struct RunSummary {
  std::filesystem::path study_dir;
  BatchResult batch;
};

RunSummary cmd_run(const std::filesystem::path& spec_path, const RunOptions& options = {});

struct AnalyzeOptions {
  std::optional<std::uint64_t> seed;
  std::size_t bootstrap_replicates = 200;
};

inline constexpr double kQuadraticFallbackR2 = 0.9;

ReportBundle cmd_analyze(const std::filesystem::path& study_dir,
                         const AnalyzeOptions& options = {});
ReportBundle cmd_optimize(const std::filesystem::path& study_dir);

// Re-renders report.txt from analysis.json / optimization.json and rewrites
// manifest.json with digests of every bundle file.
ReportBundle cmd_report(const std::filesystem::path& study_dir);

} // namespace optstudy
