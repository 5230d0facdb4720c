#pragma once

#include <span>
#include <vector>

#include "sem/hmd_ingest.hpp"
#include "sem/sem_core.hpp"

namespace sem {

/// Pointwise key values recovered from one cohort's conditional mortality.
struct KeyPointEstimates {
  int cohort = 0;
  KeyKind kind = KeyKind::IG;
  std::vector<int> ages;       // ages with an estimate; gaps are simply absent
  std::vector<double> values;  // M-hat(t) < 0 or Lambda-hat(t) >= 0
  double key_at_s = 0.0;
  std::vector<int> capped_ages;          // cond(t) at or above the cap threshold
  std::vector<int> monotonicity_flags;   // IG ages where Lambda-hat decreases by > 1e-9
};

/// Conditional values at or above this are solved at the threshold instead.
inline constexpr double kCondCap = 1.0 - 1e-12;

/// Solves q_kind(key) = q_data(S) for the anchor key.
double anchor_key_at_s(const CohortMortality& cm, KeyKind kind, const SemParams& p);

/// Solves conditional(q_kind(k), q_kind(key_s)) = cond[i] for each age.
/// `cond` is aligned with `ages`; NaN entries are treated as gaps.
KeyPointEstimates invert_pointwise(std::span<const int> ages, std::span<const double> cond,
                                   double key_s, KeyKind kind, const SemParams& p, int cohort = 0);

/// Anchor plus inversion of q(t|S), t = S..w_avail, for one cohort.
KeyPointEstimates estimate_keys(const CohortMortality& cm, KeyKind kind, const SemParams& p);

}  // namespace sem
