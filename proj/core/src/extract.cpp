#include <algorithm>
#include <cmath>
#include <optional>
#include <fnmatch.h>
#include <limits>
#include <regex>

#include "optstudy/backend.hpp"
#include "optstudy/csv.hpp"
#include "optstudy/digest.hpp"
#include "optstudy/error.hpp"

namespace optstudy {

namespace fs = std::filesystem;

namespace {

// Relative paths (generic form) under root matching a glob; '*' also
// crosses directory separators. Sorted lexicographically.
std::vector<std::string> matching_files(const fs::path& root, const std::string& pattern) {
  std::vector<std::string> out;
  if (!fs::is_directory(root)) return out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), root).generic_string();
    if (fnmatch(pattern.c_str(), rel.c_str(), 0) == 0) out.push_back(rel);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double parse_capture(const std::string& text, const std::string& where) {
  double v = 0.0;
  if (!parse_double(text, v) || !std::isfinite(v))
    fail(ErrorCode::NonNumericCapture, "capture '" + text + "' in " + where + " is not a number");
  return v;
}

double regex_last(const RegexLastMatch& rule, const fs::path& case_dir) {
  const auto files = matching_files(case_dir, rule.file_pattern);
  std::regex re;
  try {
    re = std::regex(rule.pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    fail(ErrorCode::ValidationError, "invalid QoI regex '" + rule.pattern + "': " + e.what());
  }
  std::optional<std::pair<std::string, std::string>> last;
  for (const auto& rel : files) {
    const std::string text = read_file(case_dir / rel);
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
      const auto& m = *it;
      last = {m.size() > 1 ? m[1].str() : m[0].str(), rel};
    }
  }
  if (!last)
    fail(ErrorCode::NoMatch, "pattern '" + rule.pattern + "' matched nothing in files '" +
                                 rule.file_pattern + "' (" + std::to_string(files.size()) + " files)");
  return parse_capture(last->first, last->second);
}

double csv_aggregate(const CsvAggregate& rule, const fs::path& case_dir) {
  const auto files = matching_files(case_dir, rule.file_pattern);
  if (files.empty()) fail(ErrorCode::NoMatch, "no file matches '" + rule.file_pattern + "'");
  const auto& rel = files.back();
  const auto rows = parse_csv(read_file(case_dir / rel));
  if (rows.empty()) fail(ErrorCode::EmptyColumn, rel + " has no header");
  const auto& header = rows.front();
  const auto col_it = std::find(header.begin(), header.end(), rule.column);
  if (col_it == header.end()) fail(ErrorCode::NoMatch, "column '" + rule.column + "' not in " + rel);
  const auto col = static_cast<std::size_t>(col_it - header.begin());
  std::vector<double> values;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (col >= rows[r].size() || rows[r][col].empty()) continue;
    values.push_back(parse_capture(rows[r][col], rel));
  }
  if (values.empty()) fail(ErrorCode::EmptyColumn, "column '" + rule.column + "' of " + rel + " is empty");
  switch (rule.op) {
    case AggregateOp::max: return *std::max_element(values.begin(), values.end());
    case AggregateOp::min: return *std::min_element(values.begin(), values.end());
    case AggregateOp::last: return values.back();
    case AggregateOp::mean: {
      double s = 0.0;
      for (double v : values) s += v;
      return s / static_cast<double>(values.size());
    }
  }
  return values.back();
}

// Process backends with backend_direct report the QoI as the last number
// printed on stdout.
double last_stdout_number(const fs::path& case_dir) {
  static const RegexLastMatch rule{"stdout.log", R"(([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?))"};
  return regex_last(rule, case_dir);
}

} // namespace

double extract_qoi(const QoISpec& qoi, const fs::path& case_dir) {
  double value = 0.0;
  if (const auto* rx = std::get_if<RegexLastMatch>(&qoi.extraction)) {
    value = regex_last(*rx, case_dir);
  } else if (const auto* csv = std::get_if<CsvAggregate>(&qoi.extraction)) {
    value = csv_aggregate(*csv, case_dir);
  } else {
    value = last_stdout_number(case_dir);
  }
  if (qoi.transform) value = qoi.transform->scale * value + qoi.transform->offset;
  return value;
}

} // namespace optstudy
