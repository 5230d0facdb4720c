#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "sem/sem_core.hpp"

namespace sem {

/// One data row of an HMD cohort life table. Missing values ('.') are empty.
struct LifeTableRow {
  int cohort = 0;
  int age = 0;
  std::optional<double> qx;
  std::optional<double> lx;
  int line = 0;
};

/// Parses an HMD cohort life-table text file (Year Age mx qx ax lx dx Lx Tx
/// ex). Leading header lines run through the "Year Age ..." column line; if
/// that line is absent the first two lines are treated as the header.
std::vector<LifeTableRow> parse_cohort_lifetable(std::istream& in);

/// Empirical cumulative death probabilities q(t), t = 0..w_avail, of one cohort.
struct CohortMortality {
  int cohort = 0;
  std::vector<double> q_data;  // indexed by age

  int w_avail() const { return static_cast<int>(q_data.size()) - 1; }
  double q(int age) const;

  friend bool operator==(const CohortMortality&, const CohortMortality&) = default;
};

/// Builds q(t) = 1 - l(t)/l(0) from survivorship, falling back to
/// 1 - prod_{s<t}(1 - q_x(s)) when l(0) is missing. Ages stop before the first
/// missing value and never exceed p.terminal_age.
CohortMortality build_mortality(std::span<const LifeTableRow> rows, int cohort,
                                const SemParams& p);

/// Keeps only ages observable by calendar year `last_year`.
CohortMortality truncate_to_year(const CohortMortality& cm, int last_year);

/// q(t|S) for t = S..w_avail.
std::vector<double> conditional_data(const CohortMortality& cm, int cond_age);

struct CohortPanel {
  std::vector<CohortMortality> curves;  // ascending, consecutive cohorts
  SemParams params;

  std::vector<int> cohorts() const;
  const CohortMortality& at(int cohort) const;
  bool contains(int cohort) const;

  friend bool operator==(const CohortPanel& a, const CohortPanel& b) { return a.curves == b.curves; }
};

/// Every cohort in `rows` that yields at least one age of data.
CohortPanel build_panel(std::span<const LifeTableRow> rows, const SemParams& p);

/// Normalized format: header "cohort\tage\tq", one row per (cohort, age).
void write_panel(std::ostream& out, const CohortPanel& panel);
CohortPanel read_panel(std::istream& in, const SemParams& p);

}  // namespace sem
