#pragma once

#include <span>
#include <string>
#include <vector>

#include "sem/sem_core.hpp"

namespace sem {

/// Mean of squared differences over ages c_tilde..w; both vectors must
/// cover exactly that range.
double mse(std::span<const double> pred, std::span<const double> data, int c_tilde, int w);

/// Which age opens the MSE sum: c_tilde = last_data_year - c, or the first
/// forecast age c_tilde + 1.
enum class MseLowerLimit { displayed, first_forecast };

struct MseReport {
  KeyKind kind = KeyKind::IG;
  int cohort = 0;
  std::string variant;  // "unmodified" or "modified(<delta>)"
  double mse = 0.0;
  int age_from = 0;     // c_tilde (or c_tilde + 1)
  int age_to = 0;       // w
  int n_ages = 0;
};

std::string modified_variant(double delta);

struct RenderedTable {
  std::string text;  // aligned, with footer notes
  std::string tsv;   // "cohort\t<kind>/<variant>..."
};

/// One row per cohort, columns ordered ID before IG and unmodified before
/// modified variants. Canonical columns without any report are omitted and
/// named in the footer.
RenderedTable render_table(std::span<const MseReport> reports);

}  // namespace sem
