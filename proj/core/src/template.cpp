#include <algorithm>
#include <cstdio>
#include <set>

#include "optstudy/backend.hpp"
#include "optstudy/digest.hpp"
#include "optstudy/error.hpp"

namespace optstudy {

namespace fs = std::filesystem;

std::string format_value(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

bool looks_binary(const std::string& bytes) {
  const std::size_t probe = std::min<std::size_t>(bytes.size(), 8000);
  return bytes.find('\0') < probe;
}

std::string substitute(const std::string& text, const std::map<std::string, double>& values,
                       const fs::path& file, std::set<std::string>& used) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find("@{", pos);
    if (open == std::string::npos) break;
    const auto close = text.find('}', open + 2);
    const auto newline = text.find('\n', open + 2);
    if (close == std::string::npos || close > newline) {
      out.append(text, pos, open + 2 - pos);
      pos = open + 2;
      continue;
    }
    const std::string name = text.substr(open + 2, close - open - 2);
    auto it = values.find(name);
    if (it == values.end())
      fail(ErrorCode::UnresolvedToken, "token @{" + name + "} in " + file.string() + " has no value");
    used.insert(name);
    out.append(text, pos, open - pos);
    out += format_value(it->second);
    pos = close + 1;
  }
  out.append(text, pos, std::string::npos);
  return out;
}

} // namespace

fs::path substitute_tokens(const fs::path& template_dir, const fs::path& case_dir,
                           const std::map<std::string, double>& values,
                           std::vector<std::string>* orphans) {
  if (!fs::is_directory(template_dir))
    fail(ErrorCode::IoError, "template directory " + template_dir.string() + " does not exist");
  std::error_code ec;
  fs::remove_all(case_dir, ec);
  fs::create_directories(case_dir);

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(template_dir)) {
    const auto rel = fs::relative(entry.path(), template_dir);
    if (entry.is_directory()) {
      fs::create_directories(case_dir / rel);
    } else if (entry.is_regular_file()) {
      files.push_back(rel);
    }
  }
  std::sort(files.begin(), files.end());

  std::set<std::string> used;
  for (const auto& rel : files) {
    const auto src = template_dir / rel;
    const auto dst = case_dir / rel;
    fs::create_directories(dst.parent_path());
    const std::string bytes = read_file(src);
    if (looks_binary(bytes)) {
      fs::copy_file(src, dst, fs::copy_options::overwrite_existing);
    } else {
      write_file(dst, substitute(bytes, values, rel, used));
      fs::permissions(dst, fs::status(src).permissions());
    }
  }
  if (orphans) {
    for (const auto& [name, v] : values)
      if (!used.count(name)) orphans->push_back(name);
  }
  return case_dir;
}

} // namespace optstudy
