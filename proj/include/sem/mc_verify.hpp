#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "sem/hmd_ingest.hpp"
#include "sem/sem_core.hpp"

namespace sem {

/// Inverse-Gaussian draw (Michael, Schucany and Haas transformation with
/// rejection).
double draw_inverse_gaussian(std::mt19937_64& rng, double mean, double shape);

/// Parametric key curves used to generate synthetic cohorts.
struct IgFamily {
  double a = 0.07;  // Lambda(t) = exp(a t) + b t - 1
  double b = 1.0;
  double operator()(double t) const;
};

struct IdFamily {
  double alpha = -1.0;       // U(t) = alpha + beta exp(gamma (t - T)) 1{t >= T}
  double beta = -0.5;
  double gamma = 0.08;
  double change_point = 50;  // T
  /// M(t), the integral of U over [0, t].
  double operator()(double t) const;
};

/// Diffusion dynamics for the first-passage simulator. Constant mode uses
/// (mu, v); otherwise drift(t) and vol(t) are integrated by Euler steps.
struct IdDynamics {
  double mu = -0.2;
  double v = 1.0;
  std::function<double(double)> drift;
  std::function<double(double)> vol;
  bool constant() const { return !drift; }
};

struct SimConfig {
  KeyKind kind = KeyKind::IG;
  SemParams params;
  IdDynamics id;
  std::function<double(double)> lambda;  // IG key curve
  std::size_t n_paths = 100000;
  double time_step = 0.01;
  std::uint64_t seed = 20240101;
};

struct McEstimate {
  double age = 0.0;
  double p_hat = 0.0;
  double se = 0.0;             // binomial standard error at the closed form
  double q_closed_form = 0.0;

  bool within(double n_se) const;
};

/// Empirical P(tau <= t) for a diffusion started at x. Constant mode samples
/// tau exactly from its inverse-Gaussian law; otherwise Euler steps with a
/// Brownian-bridge crossing correction.
std::vector<McEstimate> simulate_id_hitting(const SimConfig& cfg, std::span<const double> ages);

/// Empirical P(Y_t >= x) with Y_t ~ IG(Lambda(t), sigma Lambda(t)^2).
std::vector<McEstimate> simulate_ig(const SimConfig& cfg, std::span<const double> ages);

/// n draws of Y at key level `lambda_t`; when `lambda_s` is given each draw
/// is the sum of independent increments over [0, s] and [s, t].
std::vector<double> sample_ig_level(const SemParams& p, double lambda_t, std::size_t n, std::uint64_t seed,
                                    std::optional<double> lambda_s = std::nullopt);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

struct SyntheticSpec {
  KeyKind kind = KeyKind::IG;
  SemParams params;
  int first_cohort = 1781;
  std::vector<IgFamily> ig;   // one per cohort, used for IG
  std::vector<IdFamily> id;   // one per cohort, used for ID
  std::size_t cohort_size = 0;  // 0 = exact closed-form probabilities
  std::uint64_t seed = 1;
};

/// Panel with q(t) = q_kind(key(t)), t = 0..w, optionally replaced by
/// binomial death counts from a cohort of the given size.
CohortPanel generate_synthetic_panel(const SyntheticSpec& spec);

}  // namespace sem
