#include "optstudy/ledger.hpp"

#include <json.hpp>

#include "optstudy/error.hpp"

namespace optstudy {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string record_to_json_line(const RunRecord& r) {
  Json j;
  j["index"] = r.sample_index;
  Json values = Json::array();
  for (const auto& [name, v] : r.raw_values) values.push_back(Json{{"name", name}, {"value", v}});
  j["values"] = values;
  j["status"] = std::string(to_string(r.status));
  if (r.qoi_value) j["qoi"] = *r.qoi_value;
  else j["qoi"] = nullptr;
  j["stdout"] = r.stdout_path;
  j["stderr"] = r.stderr_path;
  j["wall_time"] = r.wall_time;
  if (!r.message.empty()) j["message"] = r.message;
  return j.dump();
}

RunRecord record_from_json_line(const std::string& line) {
  const Json j = Json::parse(line);
  RunRecord r;
  r.sample_index = j.at("index").get<std::size_t>();
  for (const auto& v : j.at("values")) r.raw_values.emplace_back(v.at("name").get<std::string>(), v.at("value").get<double>());
  auto status = parse_run_status(j.at("status").get<std::string>());
  if (!status) throw std::invalid_argument("unknown status");
  r.status = *status;
  if (!j.at("qoi").is_null()) r.qoi_value = j.at("qoi").get<double>();
  r.stdout_path = j.value("stdout", "");
  r.stderr_path = j.value("stderr", "");
  r.wall_time = j.value("wall_time", 0.0);
  r.message = j.value("message", "");
  return r;
}

RunLedger::RunLedger(fs::path path) : path_(std::move(path)) {}

std::vector<RunRecord> RunLedger::load() const {
  std::vector<RunRecord> records;
  std::ifstream in(path_);
  if (!in) return records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json_line(line));
    } catch (const std::exception&) {
      // torn write from an interrupted run; the case simply re-runs
    }
  }
  return records;
}

void RunLedger::append(const RunRecord& record) {
  if (!out_.is_open()) {
    if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
    // A torn final line must not swallow the next record.
    bool needs_newline = false;
    {
      std::ifstream probe(path_, std::ios::binary | std::ios::ate);
      if (probe && probe.tellg() > 0) {
        probe.seekg(-1, std::ios::end);
        needs_newline = probe.get() != '\n';
      }
    }
    out_.open(path_, std::ios::app);
    if (!out_) fail(ErrorCode::IoError, "cannot open ledger " + path_.string());
    if (needs_newline) out_ << '\n';
  }
  out_ << record_to_json_line(record) << '\n';
  out_.flush();
}

} // namespace optstudy
