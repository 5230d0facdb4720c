#include "sem/key_inversion.hpp"

#include <cmath>
#include <string>

#include "sem/error.hpp"
#include "sem/roots.hpp"

namespace sem {

namespace {

// Finds k in the admissible half-line with g(k) = 0, where g is increasing
// in mortality: for ID it decreases in k, for IG it increases. `near` is the
// end of the search range where g <= 0.
template <class G>
double solve_monotone(KeyKind kind, G&& g, double near, const SemParams& p) {
  if (kind == KeyKind::IG) {
    double hi = std::max(p.x * 1e3, 2.0 * near);
    for (int i = 0; g(hi) < 0.0; ++i) {
      if (i > 60) throw Error(ErrorKind::invariant, "key inversion: IG bracket expansion failed");
      hi *= 10.0;
    }
    return brent_root(g, near, hi).root;
  }
  double lo = std::min(-p.x * 1e3, 2.0 * near);
  for (int i = 0; g(lo) < 0.0; ++i) {
    if (i > 60) throw Error(ErrorKind::invariant, "key inversion: ID bracket expansion failed");
    lo *= 10.0;
  }
  return brent_root(g, lo, near).root;
}

}  // namespace

double anchor_key_at_s(const CohortMortality& cm, KeyKind kind, const SemParams& p) {
  const double target = cm.q(p.cond_age);
  if (!(target < 1.0))
    throw Error(ErrorKind::degenerate,
                "cohort " + std::to_string(cm.cohort) + ": q(S) = 1, cannot anchor key");
  const double boundary = kind == KeyKind::ID ? id_boundary_key(p) : 0.0;
  if (target <= q_key(kind, boundary, p)) return boundary;
  auto g = [&](double k) { return q_key(kind, k, p) - target; };
  return solve_monotone(kind, g, boundary, p);
}

KeyPointEstimates invert_pointwise(std::span<const int> ages, std::span<const double> cond,
                                   double key_s, KeyKind kind, const SemParams& p, int cohort) {
  if (ages.size() != cond.size())
    throw Error(ErrorKind::invariant, "invert_pointwise: ages and values differ in length");
  const bool admissible = kind == KeyKind::ID ? key_s < 0.0 : key_s >= 0.0;
  if (!admissible)
    throw Error(ErrorKind::domain, "invert_pointwise: anchor key outside admissible domain");

  std::string offending;
  double running_max = -1.0;
  for (std::size_t i = 0; i < cond.size(); ++i) {
    if (std::isnan(cond[i])) continue;
    if (cond[i] < -1e-9 || cond[i] > 1.0 + 1e-9)
      throw Error(ErrorKind::domain, "invert_pointwise: conditional value outside [0,1] at age " +
                                         std::to_string(ages[i]));
    if (cond[i] < running_max - 1e-9) offending += (offending.empty() ? "" : ",") + std::to_string(ages[i]);
    running_max = std::max(running_max, cond[i]);
  }
  if (!offending.empty())
    throw Error(ErrorKind::monotonicity, "cohort " + std::to_string(cohort) +
                                             ": conditional mortality decreases at ages " + offending);

  KeyPointEstimates out;
  out.cohort = cohort;
  out.kind = kind;
  out.key_at_s = key_s;
  const double q_s = q_key(kind, key_s, p);
  for (std::size_t i = 0; i < cond.size(); ++i) {
    if (std::isnan(cond[i])) continue;
    double target = cond[i];
    double value;
    if (target <= 0.0) {
      value = key_s;
    } else {
      if (target >= kCondCap) {
        target = kCondCap;
        out.capped_ages.push_back(ages[i]);
      }
      auto g = [&](double k) { return conditional_unchecked(q_key(kind, k, p), q_s) - target; };
      value = solve_monotone(kind, g, key_s, p);
    }
    if (kind == KeyKind::IG && !out.values.empty() && value < out.values.back() - 1e-9)
      out.monotonicity_flags.push_back(ages[i]);
    out.ages.push_back(ages[i]);
    out.values.push_back(value);
  }
  return out;
}

KeyPointEstimates estimate_keys(const CohortMortality& cm, KeyKind kind, const SemParams& p) {
  const double key_s = anchor_key_at_s(cm, kind, p);
  const auto cond = conditional_data(cm, p.cond_age);
  std::vector<int> ages(cond.size());
  for (std::size_t i = 0; i < ages.size(); ++i) ages[i] = p.cond_age + static_cast<int>(i);
  return invert_pointwise(ages, cond, key_s, kind, p, cm.cohort);
}

}  // namespace sem
