#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optstudy/sampling.hpp"
#include "optstudy/study.hpp"

namespace optstudy {

enum class RunStatus { ok, run_failed, extract_failed, timeout };

std::string_view to_string(RunStatus status) noexcept;
std::optional<RunStatus> parse_run_status(std::string_view text) noexcept;

struct RunRecord {
  std::size_t sample_index = 0;
  std::vector<std::pair<std::string, double>> raw_values; // parameter order
  std::optional<double> qoi_value;                         // set iff status == ok
  RunStatus status = RunStatus::run_failed;
  std::string stdout_path;
  std::string stderr_path;
  double wall_time = 0.0;
  std::string message;
};

struct Dataset {
  std::vector<ParameterDef> params;
  QoISpec qoi;
  std::vector<RunRecord> records; // plan order, every row
  std::vector<std::size_t> ok_rows; // indices into records that entered X/Q
  Eigen::MatrixXd X;              // N_ok x m normalized
  Eigen::VectorXd Q;              // N_ok

  std::size_t dimension() const noexcept { return params.size(); }
  std::size_t ok_count() const noexcept { return ok_rows.size(); }
  Eigen::MatrixXd raw_ok() const;
};

struct EvaluationPoint {
  std::size_t index = 0;
  Eigen::VectorXd raw;
  Eigen::VectorXd normalized;
  bool extrapolation = false; // validation runs may leave the box
};

// Copies template_dir to case_dir (replacing it) and substitutes every
// `@{name}` token in text files. Files containing a NUL byte are copied
// untouched. Values that match no token are reported in `orphans`.
std::filesystem::path substitute_tokens(const std::filesystem::path& template_dir,
                                        const std::filesystem::path& case_dir,
                                        const std::map<std::string, double>& values,
                                        std::vector<std::string>* orphans = nullptr);

// Decimal rendering used for substitution: 17 significant digits, %g style.
std::string format_value(double value);

// Applies the QoI's extraction rule and affine transform to a case tree.
double extract_qoi(const QoISpec& qoi, const std::filesystem::path& case_dir);

// Evaluates one point. Never throws for run-time failures; they are
// encoded in the record's status. `case_dir` is only used by process
// backends.
RunRecord run_case(const BackendConfig& cfg, const QoISpec& qoi,
                   std::span<const ParameterDef> params, const EvaluationPoint& point,
                   const std::filesystem::path& case_dir);

struct BatchOptions {
  std::size_t max_workers = 1;
  // Called under the ledger lock after each committed record.
  std::function<void(const RunRecord&)> on_commit;
  // When set, workers stop claiming new points and run_batch throws
  // Interrupted once in-flight cases are committed.
  std::atomic<bool>* cancel = nullptr;
};

struct BatchResult {
  Dataset dataset;
  std::size_t evaluated = 0; // cases run in this call
  std::size_t reused = 0;    // ok cases replayed from the ledger
};

// Evaluates all plan points under `study_dir` (cases/<i>/, ledger.ndjson,
// dataset.csv). ok rows already in the ledger with identical raw values are
// not re-run. Throws InsufficientData after writing dataset.csv when fewer
// than m + 2 rows end ok.
BatchResult run_batch(const BackendConfig& cfg, const QoISpec& qoi,
                      std::span<const ParameterDef> params, const SamplePlan& plan,
                      const std::filesystem::path& study_dir,
                      const BatchOptions& options = {});

// Builds X/Q from the ok records. Records must be in plan order.
Dataset assemble_dataset(std::vector<RunRecord> records,
                         std::span<const ParameterDef> params, const QoISpec& qoi);

std::size_t minimum_ok_rows(std::size_t m) noexcept;

// dataset.csv: index, raw params..., qoi, status
std::string dataset_to_csv(const Dataset& dataset);
Dataset dataset_from_csv(std::string_view text, std::span<const ParameterDef> params,
                         const QoISpec& qoi);

} // namespace optstudy
