#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rlr::csv {

/// Shortest text that round-trips: 17 significant digits, '.' separator.
std::string format_double(double v);

/// RFC 4180 quoting when the field holds a comma, quote or line break.
std::string quote(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

/// Splits one record (no embedded line breaks) into fields.
std::vector<std::string> split_row(std::string_view line);

double parse_double(std::string_view s);
long long parse_int(std::string_view s);

} // namespace rlr::csv
