#include "sem/hmd_ingest.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>

#include "sem/error.hpp"
#include "sem/text.hpp"

namespace sem {

namespace {

std::optional<double> parse_field(std::string_view tok, int lineno, const char* what) {
  if (tok == ".") return std::nullopt;
  try {
    return text::parse_double(tok, what);
  } catch (const Error& e) {
    throw Error(ErrorKind::parse, "line " + std::to_string(lineno) + ": " + e.what());
  }
}

int parse_age(std::string_view tok, int lineno) {
  if (!tok.empty() && tok.back() == '+') tok.remove_suffix(1);
  try {
    return text::parse_int(tok, "age");
  } catch (const Error& e) {
    throw Error(ErrorKind::parse, "line " + std::to_string(lineno) + ": " + e.what());
  }
}

}  // namespace

std::vector<LifeTableRow> parse_cohort_lifetable(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  if (lines.empty()) throw Error(ErrorKind::parse, "life table: empty file");

  std::size_t first_data = std::min<std::size_t>(2, lines.size());
  for (std::size_t i = 0; i < std::min<std::size_t>(5, lines.size()); ++i) {
    const auto toks = text::split_ws(lines[i]);
    if (!toks.empty() && toks[0] == "Year") {
      first_data = i + 1;
      break;
    }
  }

  std::vector<LifeTableRow> rows;
  for (std::size_t i = first_data; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i) + 1;
    const auto toks = text::split_ws(lines[i]);
    if (toks.empty()) continue;
    if (toks.size() < 6)
      throw Error(ErrorKind::parse, "line " + std::to_string(lineno) +
                                        ": expected at least 6 columns (Year Age mx qx ax lx)");
    LifeTableRow row;
    row.line = lineno;
    try {
      row.cohort = text::parse_int(toks[0], "year");
    } catch (const Error& e) {
      throw Error(ErrorKind::parse, "line " + std::to_string(lineno) + ": " + e.what());
    }
    row.age = parse_age(toks[1], lineno);
    row.qx = parse_field(toks[3], lineno, "qx");
    row.lx = parse_field(toks[5], lineno, "lx");
    rows.push_back(row);
  }
  if (rows.empty()) throw Error(ErrorKind::parse, "life table: no data rows");
  return rows;
}

double CohortMortality::q(int age) const {
  if (age < 0 || age > w_avail())
    throw Error(ErrorKind::domain, "cohort " + std::to_string(cohort) + ": no data at age " +
                                       std::to_string(age));
  return q_data[static_cast<std::size_t>(age)];
}

CohortMortality build_mortality(std::span<const LifeTableRow> rows, int cohort,
                                const SemParams& p) {
  std::map<int, const LifeTableRow*> by_age;
  for (const auto& r : rows)
    if (r.cohort == cohort) by_age[r.age] = &r;
  if (by_age.empty())
    throw Error(ErrorKind::data_gap, "cohort " + std::to_string(cohort) + ": no rows");

  const int max_age = by_age.rbegin()->first;
  std::string missing;
  for (int a = 0; a <= max_age; ++a)
    if (!by_age.count(a)) missing += (missing.empty() ? "" : ",") + std::to_string(a);
  if (!missing.empty())
    throw Error(ErrorKind::data_gap,
                "cohort " + std::to_string(cohort) + ": missing ages " + missing);

  CohortMortality cm{cohort, {}};
  const auto& first = *by_age.at(0);
  if (first.lx) {
    const double l0 = *first.lx;
    if (!(l0 > 0.0))
      throw Error(ErrorKind::degenerate, "cohort " + std::to_string(cohort) + ": l(0) = 0");
    double prev = l0;
    for (int a = 0; a <= std::min(max_age, p.terminal_age); ++a) {
      const auto& lx = by_age.at(a)->lx;
      if (!lx) break;
      if (*lx > prev)
        throw Error(ErrorKind::monotonicity, "cohort " + std::to_string(cohort) +
                                                 ": survivorship increases at age " +
                                                 std::to_string(a));
      prev = *lx;
      cm.q_data.push_back(std::clamp(1.0 - *lx / l0, 0.0, 1.0));
    }
  } else {
    double survival = 1.0;
    cm.q_data.push_back(0.0);
    for (int a = 0; a < std::min(max_age + 1, p.terminal_age); ++a) {
      const auto& qx = by_age.at(a)->qx;
      if (!qx) break;
      if (*qx < 0.0 || *qx > 1.0)
        throw Error(ErrorKind::domain, "cohort " + std::to_string(cohort) + ": qx outside [0,1] at age " +
                                           std::to_string(a));
      survival *= 1.0 - *qx;
      cm.q_data.push_back(std::clamp(1.0 - survival, 0.0, 1.0));
    }
  }
  return cm;
}

CohortMortality truncate_to_year(const CohortMortality& cm, int last_year) {
  const int last_age = std::min(cm.w_avail(), last_year - cm.cohort);
  if (last_age < 0)
    throw Error(ErrorKind::domain, "cohort " + std::to_string(cm.cohort) + " born after " +
                                       std::to_string(last_year));
  CohortMortality out{cm.cohort, {}};
  out.q_data.assign(cm.q_data.begin(), cm.q_data.begin() + last_age + 1);
  return out;
}

std::vector<double> conditional_data(const CohortMortality& cm, int cond_age) {
  const double q_s = cm.q(cond_age);
  if (!(q_s < 1.0))
    throw Error(ErrorKind::degenerate, "cohort " + std::to_string(cm.cohort) +
                                          ": q(S) = 1, conditional mortality undefined");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(cm.w_avail() - cond_age + 1));
  for (int t = cond_age; t <= cm.w_avail(); ++t)
    out.push_back(std::clamp(conditional_unchecked(cm.q_data[static_cast<std::size_t>(t)], q_s), 0.0, 1.0));
  return out;
}

std::vector<int> CohortPanel::cohorts() const {
  std::vector<int> out;
  out.reserve(curves.size());
  for (const auto& c : curves) out.push_back(c.cohort);
  return out;
}

bool CohortPanel::contains(int cohort) const {
  return std::any_of(curves.begin(), curves.end(), [&](const auto& c) { return c.cohort == cohort; });
}

const CohortMortality& CohortPanel::at(int cohort) const {
  for (const auto& c : curves)
    if (c.cohort == cohort) return c;
  throw Error(ErrorKind::data_gap, "cohort " + std::to_string(cohort) + " not in panel");
}

CohortPanel build_panel(std::span<const LifeTableRow> rows, const SemParams& p) {
  std::set<int> years;
  for (const auto& r : rows) years.insert(r.cohort);
  CohortPanel panel{{}, p};
  for (int y : years) {
    auto cm = build_mortality(rows, y, p);
    if (!cm.q_data.empty()) panel.curves.push_back(std::move(cm));
  }
  return panel;
}

void write_panel(std::ostream& out, const CohortPanel& panel) {
  out << "cohort\tage\tq\n";
  for (const auto& cm : panel.curves)
    for (int a = 0; a <= cm.w_avail(); ++a)
      out << cm.cohort << '\t' << a << '\t' << text::fmt(cm.q_data[static_cast<std::size_t>(a)]) << '\n';
}

CohortPanel read_panel(std::istream& in, const SemParams& p) {
  CohortPanel panel{{}, p};
  for (const auto& row : text::read_tsv(in, "cohort\tage\tq")) {
    const int cohort = text::parse_int(row.fields[0], "cohort");
    const int age = text::parse_int(row.fields[1], "age");
    const double q = text::parse_double(row.fields[2], "q");
    if (panel.curves.empty() || panel.curves.back().cohort != cohort) {
      if (!panel.curves.empty() && cohort < panel.curves.back().cohort)
        throw Error(ErrorKind::parse, "line " + std::to_string(row.line) + ": cohorts not ascending");
      panel.curves.push_back({cohort, {}});
    }
    auto& cm = panel.curves.back();
    if (age != cm.w_avail() + 1)
      throw Error(ErrorKind::parse, "line " + std::to_string(row.line) + ": expected age " +
                                        std::to_string(cm.w_avail() + 1));
    if (q < 0.0 || q > 1.0 || (!cm.q_data.empty() && q < cm.q_data.back()))
      throw Error(ErrorKind::monotonicity,
                  "line " + std::to_string(row.line) + ": q outside [0,1] or decreasing");
    cm.q_data.push_back(q);
  }
  return panel;
}

}  // namespace sem
