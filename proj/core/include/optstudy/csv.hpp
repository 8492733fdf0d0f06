#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace optstudy {

using CsvRow = std::vector<std::string>;

// Comma-separated, no quoting support beyond trimming; lines starting with
// '#' and blank lines are skipped.
std::vector<CsvRow> parse_csv(std::string_view text);

std::string format_csv_row(const CsvRow& row);

// Shortest text that parses back to the same double.
std::string format_exact(double value);

bool parse_double(std::string_view text, double& out);

} // namespace optstudy
