#pragma once

#include <span>
#include <vector>

#include "sem/fpca.hpp"
#include "sem/score_forecast.hpp"

namespace sem {

/// Per-component feasible interval for a future cohort's scores.
struct ScoreBox {
  std::vector<double> point;
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Point forecasts and delta-intervals at `horizon` (1-based) for the
/// first `components` forecasts.
ScoreBox score_box(std::span<const ScoreForecast> forecasts, int horizon, double delta, int components);

/// Observed conditional mortality q(t|S) of a partially observed cohort.
struct PartialData {
  std::vector<int> ages;
  std::vector<double> cond;
};

struct ModifiedKey {
  int cohort = 0;
  KeyKind kind = KeyKind::IG;
  double delta = 0.95;
  std::vector<double> scores_tilde;
  ScoreBox box;
  std::vector<int> fit_ages;
  double objective = 0.0;
  double objective_at_point = 0.0;
};

/// Sum over `ages` of (q(t, key(.;Z) | S) - cond(t))^2 with the conditional
/// anchored at key(S; Z).
double modification_objective(const FpcaModel& model, std::span<const double> scores,
                              std::span<const int> ages, std::span<const double> cond, const SemParams& p);

/// Refits the scores of cohort `cohort` inside the box by least squares
/// against its observed conditional mortality. Requires
/// last_training < cohort <= last_training + w - S and at least one
/// observed age above S.
ModifiedKey modify_scores(std::span<const ScoreForecast> forecasts, const FpcaModel& model, int cohort,
                          int last_training, const PartialData& partial, const SemParams& p, double delta);

/// Same optimization with an explicit box (used when the box does not come
/// from forecasts).
ModifiedKey modify_scores_in_box(const ScoreBox& box, const FpcaModel& model, const PartialData& partial,
                                 const SemParams& p);

struct MortalityPrediction {
  std::vector<int> ages;
  std::vector<double> q;           // q(t | cond_age)
  std::vector<int> clamped_ages;   // key left the admissible domain
  bool non_monotone = false;
};

/// Conditional mortality of the key curve mean + sum_j scores_j e_j.
MortalityPrediction predicted_mortality(const FpcaModel& model, std::span<const double> scores,
                                        const SemParams& p, std::span<const int> ages, int cond_age);

}  // namespace sem
