#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sem::text {

/// Shortest representation that parses back to the identical double.
std::string fmt(double v);

std::vector<std::string_view> split(std::string_view line, char sep);
std::vector<std::string_view> split_ws(std::string_view line);

/// Strict numeric parsing; throws Error(parse) naming `what`.
double parse_double(std::string_view s, std::string_view what);
int parse_int(std::string_view s, std::string_view what);

/// Reads a tab-separated file whose first line must equal `header`
/// exactly. Returns the remaining non-empty lines split into fields, each
/// checked to have the header's column count.
struct TsvRow {
  int line;
  std::vector<std::string> fields;
};
std::vector<TsvRow> read_tsv(std::istream& in, std::string_view header);

}  // namespace sem::text
