#include "sem/modification.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sem/error.hpp"
#include "sem/optimize.hpp"

namespace sem {

ScoreBox score_box(std::span<const ScoreForecast> forecasts, int horizon, double delta, int components) {
  if (components > static_cast<int>(forecasts.size()))
    throw Error(ErrorKind::domain, "score_box: fewer forecasts than selected components");
  ScoreBox box;
  for (int j = 0; j < components; ++j) {
    const auto& fc = forecasts[static_cast<std::size_t>(j)];
    if (horizon < 1 || horizon > fc.horizon)
      throw Error(ErrorKind::domain, "score_box: horizon " + std::to_string(horizon) + " not forecast");
    const auto& iv = fc.interval(delta);
    const auto k = static_cast<std::size_t>(horizon - 1);
    box.point.push_back(fc.points[k]);
    box.lower.push_back(iv.lower[k]);
    box.upper.push_back(iv.upper[k]);
  }
  return box;
}

namespace {

double key_at(const FpcaModel& model, const Eigen::VectorXd& coeffs, double t, const SemParams& p,
              bool* clamped = nullptr) {
  const auto c = clamp_key(model.kind, model.basis.eval(coeffs, t), p);
  if (clamped) *clamped = c.clamped;
  return c.value;
}

}  // namespace

double modification_objective(const FpcaModel& model, std::span<const double> scores,
                              std::span<const int> ages, std::span<const double> cond, const SemParams& p) {
  const auto coeffs = model.curve_coeffs(scores);
  const double q_s = q_key(model.kind, key_at(model, coeffs, p.cond_age, p), p);
  double ss = 0.0;
  for (std::size_t i = 0; i < ages.size(); ++i) {
    const double q_t = q_key(model.kind, key_at(model, coeffs, ages[i], p), p);
    // Same clipping as predicted_mortality so the fit targets what is reported.
    const double r = std::clamp(conditional_unchecked(q_t, q_s), 0.0, 1.0) - cond[i];
    ss += r * r;
  }
  return ss;
}

ModifiedKey modify_scores_in_box(const ScoreBox& box, const FpcaModel& model, const PartialData& partial,
                                 const SemParams& p) {
  if (partial.ages.size() != partial.cond.size())
    throw Error(ErrorKind::invariant, "modify_scores: ages and values differ in length");
  if (std::none_of(partial.ages.begin(), partial.ages.end(), [&](int a) { return a > p.cond_age; }))
    throw Error(ErrorKind::not_applicable,
                "modify_scores: no observed ages beyond S; use the unmodified forecast");
  const std::size_t k = box.point.size();

  ModifiedKey out;
  out.kind = model.kind;
  out.box = box;
  out.fit_ages = partial.ages;

  // Optimize over the unit cube of the non-degenerate components.
  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < k; ++j)
    if (box.upper[j] > box.lower[j]) free.push_back(j);
  auto to_scores = [&](std::span<const double> u) {
    std::vector<double> z = box.point;
    for (std::size_t i = 0; i < free.size(); ++i) {
      const auto j = free[i];
      z[j] = std::clamp(box.lower[j] + u[i] * (box.upper[j] - box.lower[j]), box.lower[j], box.upper[j]);
    }
    return z;
  };
  Objective obj = [&](std::span<const double> u) {
    const auto z = to_scores(u);
    return modification_objective(model, z, partial.ages, partial.cond, p);
  };

  std::vector<double> start(free.size());
  for (std::size_t i = 0; i < free.size(); ++i) {
    const auto j = free[i];
    start[i] = (std::clamp(box.point[j], box.lower[j], box.upper[j]) - box.lower[j]) / (box.upper[j] - box.lower[j]);
  }
  out.objective_at_point = modification_objective(model, to_scores(start), partial.ages, partial.cond, p);

  NelderMeadOptions opts;
  opts.lower.assign(free.size(), 0.0);
  opts.upper.assign(free.size(), 1.0);
  opts.xtol = 1e-11;
  opts.max_evaluations = 4000 * static_cast<int>(free.size() + 1);

  std::vector<double> best_u = start;
  double best_f = out.objective_at_point;
  // Start at the point forecast with a small simplex, then from the box
  // centre with a wide one; each run is restarted at its own optimum until
  // it stops improving.
  const std::vector<double> centre(free.size(), 0.5);
  for (const auto& [origin, scale] : {std::pair{start, 0.05}, std::pair{centre, 0.25}}) {
    std::vector<double> u = origin;
    double f_prev = HUGE_VAL;
    for (int restart = 0; restart < 8 && !free.empty(); ++restart) {
      const std::vector<double> step(free.size(), restart == 0 ? scale : 0.02);
      const auto res = nelder_mead(obj, u, step, opts);
      if (res.f < best_f) {
        best_f = res.f;
        best_u = res.x;
      }
      if (!(res.f < f_prev - 1e-15 * (1.0 + f_prev)) && restart > 0) break;
      f_prev = res.f;
      u = res.x;
    }
  }
  out.scores_tilde = to_scores(best_u);
  out.objective = best_f;
  return out;
}

ModifiedKey modify_scores(std::span<const ScoreForecast> forecasts, const FpcaModel& model, int cohort,
                          int last_training, const PartialData& partial, const SemParams& p, double delta) {
  const int max_cohort = last_training + p.terminal_age - p.cond_age;
  if (cohort <= last_training || cohort > max_cohort)
    throw Error(ErrorKind::not_applicable,
                "modify_scores: cohort " + std::to_string(cohort) + " outside (" + std::to_string(last_training) +
                    ", " + std::to_string(max_cohort) + "]; use the unmodified forecast");
  const int last_age = last_training + p.terminal_age - cohort;
  PartialData used;
  for (std::size_t i = 0; i < partial.ages.size(); ++i) {
    if (partial.ages[i] < p.cond_age || partial.ages[i] > last_age || std::isnan(partial.cond[i])) continue;
    used.ages.push_back(partial.ages[i]);
    used.cond.push_back(partial.cond[i]);
  }
  if (used.ages.empty()) throw Error(ErrorKind::not_applicable, "modify_scores: empty partial data");
  const auto box = score_box(forecasts, cohort - last_training, delta, model.k_selected);
  auto out = modify_scores_in_box(box, model, used, p);
  out.cohort = cohort;
  out.delta = delta;
  return out;
}

MortalityPrediction predicted_mortality(const FpcaModel& model, std::span<const double> scores,
                                        const SemParams& p, std::span<const int> ages, int cond_age) {
  const auto coeffs = model.curve_coeffs(scores);
  MortalityPrediction out;
  bool clamped = false;
  const double q_s = q_key(model.kind, key_at(model, coeffs, cond_age, p, &clamped), p);
  if (clamped) out.clamped_ages.push_back(cond_age);
  if (!(q_s < 1.0)) throw Error(ErrorKind::degenerate, "predicted_mortality: q(S) = 1");
  double prev = -HUGE_VAL;
  for (int t : ages) {
    if (t < cond_age || t > p.terminal_age)
      throw Error(ErrorKind::domain, "predicted_mortality: age " + std::to_string(t) + " outside [" +
                                         std::to_string(cond_age) + ", w]");
    const double q_t = q_key(model.kind, key_at(model, coeffs, t, p, &clamped), p);
    if (clamped) out.clamped_ages.push_back(t);
    const double c = conditional_unchecked(q_t, q_s);
    if (c < prev - 1e-12 || c < -1e-12) out.non_monotone = true;
    prev = std::max(prev, c);
    out.ages.push_back(t);
    out.q.push_back(std::clamp(c, 0.0, 1.0));
  }
  return out;
}

}  // namespace sem
