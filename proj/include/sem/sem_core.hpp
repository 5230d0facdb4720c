#pragma once

#include <string_view>

namespace sem {

/// Fixed model constants shared by every cohort.
struct SemParams {
  double x = 1000.0;      // initial survival energy
  double kappa = -0.25;   // drift / dispersion ratio of the diffusion model
  double sigma = 0.001;   // inverse-Gaussian shape scale
  int cond_age = 20;      // S
  int terminal_age = 110; // w

  /// Throws Error(domain) unless x > 0, kappa < 0, sigma > 0 and S < w.
  void validate() const;
};

enum class KeyKind { ID, IG };

std::string_view to_string(KeyKind kind);
KeyKind key_kind_from_string(std::string_view s);

/// Standard normal distribution function.
double norm_cdf(double z);

/// ln Phi(z). Switches to a continued-fraction tail for z < -8 so that
/// exp(a + log_norm_cdf(z)) stays accurate when Phi(z) itself underflows.
double log_norm_cdf(double z);

/// Cumulative death probability of the diffusion model for drift integral
/// `key_m` (< 0). The dispersion integral is recovered as key_m / kappa.
double q_id(double key_m, const SemParams& p);

/// Cumulative death probability of the inverse-Gaussian model for key
/// value `key_l` (>= 0).
double q_ig(double key_l, const SemParams& p);

/// Dispatches to q_id or q_ig.
double q_key(KeyKind kind, double key, const SemParams& p);

/// P(tau <= t | tau > S) from the unconditional probabilities at t and S.
double conditional(double q_t, double q_s);

/// Same ratio without the ordering check; may return values outside [0,1]
/// when q_t < q_s. Used by objectives that must stay total.
double conditional_unchecked(double q_t, double q_s);

/// Closest admissible key for `kind` (M <= -eps, Lambda >= 0) and whether
/// clamping was needed.
struct ClampedKey {
  double value;
  bool clamped;
};
ClampedKey clamp_key(KeyKind kind, double key, const SemParams& p);

/// Boundary key used in place of M = 0: -1e-8 * x.
double id_boundary_key(const SemParams& p);

}  // namespace sem
