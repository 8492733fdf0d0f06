#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace optstudy {

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  bool spawn_failed = false;
  double wall_time = 0.0;
};

// Runs argv in its own process group with `cwd` as working directory and
// stdout/stderr redirected to files. On timeout the whole group is killed.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd,
                          const std::vector<std::pair<std::string, std::string>>& extra_env,
                          const std::filesystem::path& stdout_path,
                          const std::filesystem::path& stderr_path,
                          double timeout_seconds);

} // namespace optstudy
