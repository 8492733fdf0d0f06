#pragma once

#include <filesystem>
#include <fstream>
#include <vector>

#include "optstudy/backend.hpp"

namespace optstudy {

// Append-only, one JSON object per line. A truncated final line (the
// process was killed mid-write) is ignored on load.
class RunLedger {
public:
  explicit RunLedger(std::filesystem::path path);

  const std::filesystem::path& path() const noexcept { return path_; }

  std::vector<RunRecord> load() const;

  // Appends and flushes one record.
  void append(const RunRecord& record);

private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::string record_to_json_line(const RunRecord& record);
RunRecord record_from_json_line(const std::string& line);

} // namespace optstudy
