#include "sem/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "sem/error.hpp"
#include "sem/text.hpp"

namespace sem {

double mse(std::span<const double> pred, std::span<const double> data, int c_tilde, int w) {
  if (c_tilde > w) throw Error(ErrorKind::domain, "mse: empty age range");
  const auto n = static_cast<std::size_t>(w - c_tilde + 1);
  if (pred.size() != n || data.size() != n)
    throw Error(ErrorKind::domain, "mse: expected " + std::to_string(n) + " ages, got " +
                                       std::to_string(pred.size()) + " predicted and " +
                                       std::to_string(data.size()) + " observed");
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += (pred[i] - data[i]) * (pred[i] - data[i]);
  return ss / static_cast<double>(n);
}

std::string modified_variant(double delta) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "modified(%g)", delta);
  return buf;
}

namespace {

// Sort key: kind (ID first), then unmodified before modified, then label.
std::tuple<int, int, std::string> column_key(KeyKind kind, const std::string& variant) {
  return {kind == KeyKind::ID ? 0 : 1, variant == "unmodified" ? 0 : 1, variant};
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4E", v);
  return buf;
}

}  // namespace

RenderedTable render_table(std::span<const MseReport> reports) {
  if (reports.empty()) return {"(no MSE reports)\n", "cohort\n"};

  using Column = std::pair<KeyKind, std::string>;
  std::vector<Column> columns;
  std::map<std::pair<int, std::string>, const MseReport*> cells;  // (cohort, column label)
  std::set<int> cohorts;
  for (const auto& r : reports) {
    const Column col{r.kind, r.variant};
    if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
    cells[{r.cohort, std::string(to_string(r.kind)) + "/" + r.variant}] = &r;
    cohorts.insert(r.cohort);
  }
  std::sort(columns.begin(), columns.end(), [](const Column& a, const Column& b) {
    return column_key(a.first, a.second) < column_key(b.first, b.second);
  });

  std::vector<std::string> labels;
  for (const auto& [kind, variant] : columns) labels.push_back(std::string(to_string(kind)) + "/" + variant);

  std::ostringstream txt, tsv;
  constexpr int first_width = 8;
  std::vector<std::size_t> widths;
  for (const auto& l : labels) widths.push_back(std::max<std::size_t>(l.size(), 10) + 2);

  char buf[64];
  std::snprintf(buf, sizeof buf, "%-*s", first_width, "Cohort");
  txt << buf;
  tsv << "cohort";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%*s", static_cast<int>(widths[i]), labels[i].c_str());
    txt << buf;
    tsv << '\t' << labels[i];
  }
  txt << '\n';
  tsv << '\n';
  for (int c : cohorts) {
    std::snprintf(buf, sizeof buf, "%-*d", first_width, c);
    txt << buf;
    tsv << c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto it = cells.find({c, labels[i]});
      const std::string cell = it == cells.end() ? "-" : sci(it->second->mse);
      std::snprintf(buf, sizeof buf, "%*s", static_cast<int>(widths[i]), cell.c_str());
      txt << buf;
      tsv << '\t' << (it == cells.end() ? "NA" : text::fmt(it->second->mse));
    }
    txt << '\n';
    tsv << '\n';
  }

  std::vector<std::string> omitted;
  for (KeyKind kind : {KeyKind::ID, KeyKind::IG}) {
    const bool any_unmod = std::any_of(columns.begin(), columns.end(), [&](const Column& col) {
      return col.first == kind && col.second == "unmodified";
    });
    const bool any_mod = std::any_of(columns.begin(), columns.end(), [&](const Column& col) {
      return col.first == kind && col.second != "unmodified";
    });
    if (!any_unmod) omitted.push_back(std::string(to_string(kind)) + "/unmodified");
    if (!any_mod) omitted.push_back(std::string(to_string(kind)) + "/modified");
  }
  if (!omitted.empty()) {
    txt << "note: no reports for";
    for (const auto& o : omitted) txt << ' ' << o;
    txt << "; column(s) omitted\n";
  }
  return {txt.str(), tsv.str()};
}

}  // namespace sem
