#include "sem/sem_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sem/error.hpp"

namespace sem {

void SemParams::validate() const {
  if (!(x > 0.0) || !std::isfinite(x))
    throw Error(ErrorKind::domain, "SemParams: x must be positive");
  if (!(kappa < 0.0) || !std::isfinite(kappa))
    throw Error(ErrorKind::domain, "SemParams: kappa must be negative");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error(ErrorKind::domain, "SemParams: sigma must be positive");
  if (cond_age >= terminal_age)
    throw Error(ErrorKind::domain, "SemParams: conditioning age S must be below terminal age w");
}

std::string_view to_string(KeyKind kind) { return kind == KeyKind::ID ? "ID" : "IG"; }

KeyKind key_kind_from_string(std::string_view s) {
  if (s == "ID") return KeyKind::ID;
  if (s == "IG") return KeyKind::IG;
  throw Error(ErrorKind::parse, "unknown key kind '" + std::string(s) + "'");
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

namespace {

// Mills ratio R(u) = Phi(-u)/phi(u) for u > 0 via the Laplace continued
// fraction 1/(u + 1/(u + 2/(u + 3/(u + ...)))), evaluated bottom-up.
double mills_ratio(double u) {
  constexpr int terms = 120;
  double tail = u;
  for (int k = terms; k >= 1; --k) tail = u + k / tail;
  return 1.0 / tail;
}

}  // namespace

double log_norm_cdf(double z) {
  if (z < -8.0) {
    const double u = -z;
    return -0.5 * u * u - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(mills_ratio(u));
  }
  if (z > 5.0) return std::log1p(-norm_cdf(-z));
  return std::log(norm_cdf(z));
}

double id_boundary_key(const SemParams& p) { return -1e-8 * p.x; }

double q_id(double key_m, const SemParams& p) {
  if (!(key_m < 0.0))
    throw Error(ErrorKind::domain, "q_id: key M must be strictly negative");
  if (std::isinf(key_m)) return 1.0;
  const double s = key_m / p.kappa;
  const double root = std::sqrt(2.0 * s);
  const double upper = norm_cdf(-(p.x + key_m) / root);
  const double lower = std::exp(-p.kappa * p.x + log_norm_cdf((-p.x + key_m) / root));
  return std::clamp(upper + lower, 0.0, 1.0);
}

double q_ig(double key_l, const SemParams& p) {
  if (!(key_l >= 0.0))
    throw Error(ErrorKind::domain, "q_ig: key Lambda must be nonnegative");
  if (key_l == 0.0) return 0.0;
  if (std::isinf(key_l)) return 1.0;
  const double scale = std::sqrt(p.sigma / p.x);
  const double first = norm_cdf(scale * (key_l - p.x));
  const double second = std::exp(2.0 * p.sigma * key_l + log_norm_cdf(-scale * (key_l + p.x)));
  return std::clamp(first - second, 0.0, 1.0);
}

double q_key(KeyKind kind, double key, const SemParams& p) {
  return kind == KeyKind::ID ? q_id(key, p) : q_ig(key, p);
}

double conditional_unchecked(double q_t, double q_s) { return (q_t - q_s) / (1.0 - q_s); }

double conditional(double q_t, double q_s) {
  if (!(q_s < 1.0))
    throw Error(ErrorKind::degenerate, "conditional: q(S) = 1 leaves nothing to condition on");
  if (q_t < q_s)
    throw Error(ErrorKind::monotonicity, "conditional: q(t) < q(S)");
  return std::clamp(conditional_unchecked(q_t, q_s), 0.0, 1.0);
}

ClampedKey clamp_key(KeyKind kind, double key, const SemParams& p) {
  if (kind == KeyKind::ID) {
    const double bound = id_boundary_key(p);
    if (!(key <= bound)) return {bound, true};
    return {key, false};
  }
  if (!(key >= 0.0)) return {0.0, true};
  return {key, false};
}

}  // namespace sem
