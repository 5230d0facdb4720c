#include "sem/text.hpp"

#include <charconv>
#include <istream>
#include <string>

#include "sem/error.hpp"

namespace sem::text {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    throw Error(ErrorKind::parse, "invalid number '" + std::string(s) + "' for " + std::string(what));
  return v;
}

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    throw Error(ErrorKind::parse, "invalid integer '" + std::string(s) + "' for " + std::string(what));
  return v;
}

std::vector<TsvRow> read_tsv(std::istream& in, std::string_view header) {
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorKind::parse, "empty file, expected header '" + std::string(header) + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    throw Error(ErrorKind::validation,
                "unexpected header '" + line + "', expected '" + std::string(header) + "'");
  const std::size_t ncols = split(header, '\t').size();
  std::vector<TsvRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto parts = split(line, '\t');
    if (parts.size() != ncols)
      throw Error(ErrorKind::parse, "line " + std::to_string(lineno) + ": expected " +
                                        std::to_string(ncols) + " fields, got " +
                                        std::to_string(parts.size()));
    TsvRow row{lineno, {}};
    row.fields.reserve(ncols);
    for (auto p : parts) row.fields.emplace_back(p);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace sem::text
