#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace grove::csv {

/// Splits on commas (no quoting), drops '\r' and trims blanks around cells.
std::vector<std::string> split_line(const std::string& line);

/// Whole-cell floating-point parse; nullopt on junk or an empty cell.
std::optional<double> parse_number(std::string_view cell);

/// printf-style "%.<digits>g".
std::string format_number(double v, int digits = 9);

/// Comma-joins cells.
std::string join(const std::vector<std::string>& cells);

}  // namespace grove::csv
