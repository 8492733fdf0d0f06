#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

namespace optstudy::testing {

inline std::filesystem::path source_dir() { return OPTSTUDY_SOURCE_DIR; }
inline std::filesystem::path studies_dir() { return source_dir() / "studies"; }

// Fresh scratch directory under the system temp dir, removed on scope exit.
class ScratchDir {
public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("optstudy_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
  std::filesystem::path path_;
};

} // namespace optstudy::testing
