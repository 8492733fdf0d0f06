#include "optstudy/backend.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "optstudy/analytic.hpp"
#include "optstudy/csv.hpp"
#include "optstudy/digest.hpp"
#include "optstudy/error.hpp"
#include "optstudy/ledger.hpp"
#include "optstudy/process.hpp"

namespace optstudy {

namespace fs = std::filesystem;

std::string_view to_string(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::ok: return "ok";
    case RunStatus::run_failed: return "run_failed";
    case RunStatus::extract_failed: return "extract_failed";
    case RunStatus::timeout: return "timeout";
  }
  return "run_failed";
}

std::optional<RunStatus> parse_run_status(std::string_view text) noexcept {
  for (auto s : {RunStatus::ok, RunStatus::run_failed, RunStatus::extract_failed, RunStatus::timeout})
    if (to_string(s) == text) return s;
  return std::nullopt;
}

Eigen::MatrixXd Dataset::raw_ok() const {
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(ok_rows.size()), static_cast<Eigen::Index>(params.size()));
  for (std::size_t r = 0; r < ok_rows.size(); ++r) {
    const auto& rec = records[ok_rows[r]];
    for (std::size_t j = 0; j < params.size(); ++j)
      raw(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = rec.raw_values[j].second;
  }
  return raw;
}

std::size_t minimum_ok_rows(std::size_t m) noexcept { return m + 2; }

namespace {

std::string env_name(const std::string& param) {
  std::string out = "PARAM_";
  for (char ch : param) {
    const auto c = static_cast<unsigned char>(ch);
    out.push_back(std::isalnum(c) && c < 0x80 ? static_cast<char>(std::toupper(c)) : '_');
  }
  return out;
}

void run_analytic(const BackendConfig& cfg, const EvaluationPoint& point, RunRecord& rec) {
  std::vector<double> raw(point.raw.data(), point.raw.data() + point.raw.size());
  std::vector<double> unit(point.normalized.data(), point.normalized.data() + point.normalized.size());
  try {
    const double v = evaluate_analytic(cfg.analytic_name,
                                       AnalyticInput{raw, unit, cfg.analytic_params, point.index});
    if (!std::isfinite(v)) {
      rec.status = RunStatus::run_failed;
      rec.message = "analytic model returned a non-finite value";
      return;
    }
    rec.qoi_value = v;
    rec.status = RunStatus::ok;
  } catch (const std::exception& e) {
    rec.status = RunStatus::run_failed;
    rec.message = e.what();
  }
}

void run_process_case(const BackendConfig& cfg, const QoISpec& qoi, std::span<const ParameterDef> params,
                      const EvaluationPoint& point, const fs::path& case_dir, RunRecord& rec) {
  std::map<std::string, double> values;
  std::vector<std::pair<std::string, std::string>> env;
  for (std::size_t j = 0; j < params.size(); ++j) {
    const double v = point.raw(static_cast<Eigen::Index>(j));
    values[params[j].name] = v;
    env.emplace_back(env_name(params[j].name), format_value(v));
  }
  try {
    std::vector<std::string> orphans;
    substitute_tokens(cfg.template_dir, case_dir, values, &orphans);
    for (const auto& o : orphans) rec.message += "warning: value '" + o + "' matches no token; ";
  } catch (const std::exception& e) {
    rec.status = RunStatus::run_failed;
    rec.message = e.what();
    return;
  }
  rec.stdout_path = (case_dir / "stdout.log").string();
  rec.stderr_path = (case_dir / "stderr.log").string();
  const auto proc = run_process(cfg.run_command, case_dir, env, rec.stdout_path, rec.stderr_path,
                                cfg.timeout_seconds);
  if (proc.timed_out) {
    rec.status = RunStatus::timeout;
    rec.message += "timed out after " + format_exact(cfg.timeout_seconds) + " s";
    return;
  }
  if (proc.spawn_failed || proc.exit_code != 0) {
    rec.status = RunStatus::run_failed;
    rec.message += "command exited with status " + std::to_string(proc.exit_code);
    return;
  }
  try {
    const double v = extract_qoi(qoi, case_dir);
    if (!std::isfinite(v)) throw StudyError(ErrorCode::NonNumericCapture, "non-finite QoI");
    rec.qoi_value = v;
    rec.status = RunStatus::ok;
  } catch (const std::exception& e) {
    rec.status = RunStatus::extract_failed;
    rec.message += e.what();
  }
}

bool same_point(const RunRecord& rec, std::span<const ParameterDef> params, const Eigen::VectorXd& raw) {
  if (rec.raw_values.size() != params.size()) return false;
  for (std::size_t j = 0; j < params.size(); ++j) {
    if (rec.raw_values[j].first != params[j].name) return false;
    if (rec.raw_values[j].second != raw(static_cast<Eigen::Index>(j))) return false;
  }
  return true;
}

} // namespace

RunRecord run_case(const BackendConfig& cfg, const QoISpec& qoi, std::span<const ParameterDef> params,
                   const EvaluationPoint& point, const fs::path& case_dir) {
  RunRecord rec;
  rec.sample_index = point.index;
  for (std::size_t j = 0; j < params.size(); ++j)
    rec.raw_values.emplace_back(params[j].name, point.raw(static_cast<Eigen::Index>(j)));
  const auto start = std::chrono::steady_clock::now();
  if (cfg.kind == BackendKind::analytic) {
    run_analytic(cfg, point, rec);
  } else {
    run_process_case(cfg, qoi, params, point, case_dir, rec);
  }
  if (point.extrapolation) rec.message += (rec.message.empty() ? "" : "; ") + std::string("extrapolation");
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (rec.status != RunStatus::ok) rec.qoi_value.reset();
  return rec;
}

Dataset assemble_dataset(std::vector<RunRecord> records, std::span<const ParameterDef> params,
                         const QoISpec& qoi) {
  Dataset ds;
  ds.params.assign(params.begin(), params.end());
  ds.qoi = qoi;
  ds.records = std::move(records);
  for (std::size_t i = 0; i < ds.records.size(); ++i)
    if (ds.records[i].status == RunStatus::ok && ds.records[i].qoi_value) ds.ok_rows.push_back(i);
  const auto n = static_cast<Eigen::Index>(ds.ok_rows.size());
  const auto m = static_cast<Eigen::Index>(params.size());
  ds.X.resize(n, m);
  ds.Q.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& rec = ds.records[ds.ok_rows[static_cast<std::size_t>(r)]];
    require(rec.raw_values.size() == params.size(), ErrorCode::SchemaError,
            "record " + std::to_string(rec.sample_index) + " has the wrong number of values");
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& p = params[static_cast<std::size_t>(j)];
      ds.X(r, j) = normalize(rec.raw_values[static_cast<std::size_t>(j)].second, p.lower, p.upper);
    }
    ds.Q(r) = *rec.qoi_value;
  }
  return ds;
}

BatchResult run_batch(const BackendConfig& cfg, const QoISpec& qoi, std::span<const ParameterDef> params,
                      const SamplePlan& plan, const fs::path& study_dir, const BatchOptions& options) {
  require(options.max_workers >= 1, ErrorCode::PreconditionViolated, "max_workers must be at least 1");
  require(plan.dimension() == params.size(), ErrorCode::PreconditionViolated,
          "plan dimension does not match parameter count");
  validate(cfg);
  fs::create_directories(study_dir);

  RunLedger ledger(study_dir / "ledger.ndjson");
  const std::size_t n = plan.size();
  std::vector<std::optional<RunRecord>> slots(n);
  BatchResult result;
  for (auto& rec : ledger.load()) {
    if (rec.sample_index >= n || rec.status != RunStatus::ok || !rec.qoi_value) continue;
    const Eigen::VectorXd raw = plan.raw.row(static_cast<Eigen::Index>(rec.sample_index)).transpose();
    if (same_point(rec, params, raw)) slots[rec.sample_index] = std::move(rec);
  }
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i]) ++result.reused;
    else pending.push_back(i);
  }

  std::mutex commit_mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> evaluated{0};
  std::exception_ptr worker_error;
  auto worker = [&] {
    while (true) {
      if (options.cancel && options.cancel->load()) return;
      const std::size_t k = next.fetch_add(1);
      if (k >= pending.size()) return;
      const std::size_t i = pending[k];
      EvaluationPoint point;
      point.index = i;
      point.raw = plan.raw.row(static_cast<Eigen::Index>(i)).transpose();
      point.normalized = plan.normalized.row(static_cast<Eigen::Index>(i)).transpose();
      RunRecord rec = run_case(cfg, qoi, params, point, study_dir / "cases" / std::to_string(i));
      std::lock_guard lock(commit_mutex);
      try {
        ledger.append(rec);
        ++evaluated;
        slots[i] = rec;
        if (options.on_commit) options.on_commit(rec);
      } catch (...) {
        if (!worker_error) worker_error = std::current_exception();
        if (options.cancel) options.cancel->store(true);
        return;
      }
    }
  };

  const std::size_t workers = std::min(options.max_workers, std::max<std::size_t>(pending.size(), 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (worker_error) std::rethrow_exception(worker_error);
  result.evaluated = evaluated.load();

  for (std::size_t i = 0; i < n; ++i)
    if (!slots[i])
      fail(ErrorCode::Interrupted, "batch interrupted with " + std::to_string(result.evaluated) +
                                       " new cases committed; rerun to resume");

  std::vector<RunRecord> records;
  records.reserve(n);
  for (auto& s : slots) records.push_back(std::move(*s));
  result.dataset = assemble_dataset(std::move(records), params, qoi);
  write_file(study_dir / "dataset.csv", dataset_to_csv(result.dataset));

  const std::size_t need = minimum_ok_rows(params.size());
  if (result.dataset.ok_count() < need)
    fail(ErrorCode::InsufficientData, std::to_string(result.dataset.ok_count()) + " of " + std::to_string(n) +
                                          " cases succeeded; at least " + std::to_string(need) +
                                          " are needed. Check the case logs or add samples.");
  return result;
}

std::string dataset_to_csv(const Dataset& ds) {
  CsvRow header{"index"};
  for (const auto& p : ds.params) header.push_back(p.name);
  header.push_back("qoi");
  header.push_back("status");
  std::string out = format_csv_row(header);
  for (const auto& rec : ds.records) {
    CsvRow row{std::to_string(rec.sample_index)};
    for (const auto& [name, v] : rec.raw_values) row.push_back(format_exact(v));
    row.push_back(rec.qoi_value ? format_exact(*rec.qoi_value) : "");
    row.emplace_back(to_string(rec.status));
    out += format_csv_row(row);
  }
  return out;
}

Dataset dataset_from_csv(std::string_view text, std::span<const ParameterDef> params, const QoISpec& qoi) {
  const auto rows = parse_csv(text);
  require(!rows.empty(), ErrorCode::SchemaError, "dataset.csv is empty");
  const auto& header = rows.front();
  const std::size_t m = params.size();
  require(header.size() == m + 3 && header.front() == "index" && header[m + 1] == "qoi" &&
              header[m + 2] == "status",
          ErrorCode::SchemaError, "dataset.csv header does not match the study parameters");
  for (std::size_t j = 0; j < m; ++j)
    require(header[j + 1] == params[j].name, ErrorCode::SchemaError,
            "dataset.csv column '" + header[j + 1] + "' does not match parameter '" + params[j].name + "'");
  std::vector<RunRecord> records;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    require(row.size() == header.size(), ErrorCode::SchemaError, "dataset.csv row " + std::to_string(r) + " is ragged");
    RunRecord rec;
    rec.sample_index = static_cast<std::size_t>(std::stoull(row[0]));
    for (std::size_t j = 0; j < m; ++j) {
      double v = 0.0;
      require(parse_double(row[j + 1], v), ErrorCode::SchemaError, "dataset.csv: bad number '" + row[j + 1] + "'");
      rec.raw_values.emplace_back(params[j].name, v);
    }
    auto status = parse_run_status(row[m + 2]);
    require(status.has_value(), ErrorCode::SchemaError, "dataset.csv: bad status '" + row[m + 2] + "'");
    rec.status = *status;
    if (!row[m + 1].empty()) {
      double q = 0.0;
      require(parse_double(row[m + 1], q), ErrorCode::SchemaError, "dataset.csv: bad qoi '" + row[m + 1] + "'");
      rec.qoi_value = q;
    }
    records.push_back(std::move(rec));
  }
  return assemble_dataset(std::move(records), params, qoi);
}

} // namespace optstudy
