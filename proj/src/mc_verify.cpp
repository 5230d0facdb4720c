#include "sem/mc_verify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sem/error.hpp"
#include "sem/parallel.hpp"

namespace sem {

namespace {

constexpr std::size_t kChunk = 1u << 15;

std::mt19937_64 chunk_rng(std::uint64_t seed, std::size_t chunk, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), stream};
  return std::mt19937_64(seq);
}

// Runs body(rng, begin, end, counts) over fixed-size chunks of n paths and
// sums the per-age counts. Chunk layout depends only on n, so results are
// independent of the thread count.
template <class Body>
std::vector<std::size_t> chunked_counts(std::size_t n, std::size_t n_ages, std::uint64_t seed,
                                        std::uint32_t stream, Body&& body) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<std::vector<std::size_t>> partial(chunks, std::vector<std::size_t>(n_ages, 0));
  parallel_for(chunks, [&](std::size_t c) {
    auto rng = chunk_rng(seed, c, stream);
    body(rng, c * kChunk, std::min(n, (c + 1) * kChunk), partial[c]);
  });
  std::vector<std::size_t> total(n_ages, 0);
  for (const auto& part : partial)
    for (std::size_t a = 0; a < n_ages; ++a) total[a] += part[a];
  return total;
}

// Adaptive Gauss-Kronrod; bisection copes with the change-point kink.
double integrate(const std::function<double(double)>& f, double a, double b) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-14);
}

McEstimate make_estimate(double age, std::size_t hits, std::size_t n, double q) {
  const double p_hat = static_cast<double>(hits) / static_cast<double>(n);
  return {age, p_hat, std::sqrt(q * (1.0 - q) / static_cast<double>(n)), q};
}

}  // namespace

bool McEstimate::within(double n_se) const { return std::fabs(p_hat - q_closed_form) <= n_se * se; }

double draw_inverse_gaussian(std::mt19937_64& rng, double mean, double shape) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  const double nu = normal(rng);
  const double y = nu * nu;
  const double my = mean * y;
  // x = mean + mean^2 y/(2 shape) - (mean/(2 shape)) sqrt(4 mean shape y + mean^2 y^2),
  // rearranged to avoid cancellation.
  const double x = mean - 2.0 * mean * my / (my + std::sqrt(my * my + 4.0 * mean * shape * y));
  return unif(rng) <= mean / (mean + x) ? x : mean * mean / x;
}

double IgFamily::operator()(double t) const { return std::exp(a * t) + b * t - 1.0; }

double IdFamily::operator()(double t) const {
  double m = alpha * t;
  if (t >= change_point) m += beta / gamma * std::expm1(gamma * (t - change_point));
  return m;
}

std::vector<McEstimate> simulate_id_hitting(const SimConfig& cfg, std::span<const double> ages) {
  if (cfg.n_paths < 1) throw Error(ErrorKind::domain, "simulate_id_hitting: n_paths must be positive");
  const double x0 = cfg.params.x;
  std::vector<McEstimate> out;
  if (cfg.id.constant()) {
    const double mu = cfg.id.mu, v = cfg.id.v;
    if (!(mu < 0.0)) throw Error(ErrorKind::domain, "simulate_id_hitting: drift must be negative");
    if (!(v > 0.0)) throw Error(ErrorKind::domain, "simulate_id_hitting: volatility must be positive");
    const double mean = x0 / -mu, shape = x0 * x0 / (v * v);
    const auto counts = chunked_counts(cfg.n_paths, ages.size(), cfg.seed, 1, [&](auto& rng, std::size_t b, std::size_t e, auto& cnt) {
      for (std::size_t i = b; i < e; ++i) {
        const double tau = draw_inverse_gaussian(rng, mean, shape);
        for (std::size_t a = 0; a < ages.size(); ++a) cnt[a] += tau <= ages[a];
      }
    });
    SemParams p = cfg.params;
    p.kappa = 2.0 * mu / (v * v);
    for (std::size_t a = 0; a < ages.size(); ++a) {
      const double q = ages[a] > 0.0 ? q_id(mu * ages[a], p) : 0.0;
      out.push_back(make_estimate(ages[a], counts[a], cfg.n_paths, q));
    }
    return out;
  }

  if (!(cfg.time_step > 0.0)) throw Error(ErrorKind::domain, "simulate_id_hitting: time_step must be positive");
  const double t_max = ages.empty() ? 0.0 : *std::max_element(ages.begin(), ages.end());
  const auto counts = chunked_counts(cfg.n_paths, ages.size(), cfg.seed, 2, [&](auto& rng, std::size_t b, std::size_t e, auto& cnt) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif;
    for (std::size_t i = b; i < e; ++i) {
      double x = x0, t = 0.0, tau = HUGE_VAL;
      while (t < t_max) {
        const double h = std::min(cfg.time_step, t_max - t);
        const double vol = cfg.id.vol(t);
        const double next = x + cfg.id.drift(t) * h + vol * std::sqrt(h) * normal(rng);
        if (next <= 0.0 || unif(rng) < std::exp(-2.0 * x * next / (vol * vol * h))) {
          tau = t + h;
          break;
        }
        x = next;
        t += h;
      }
      for (std::size_t a = 0; a < ages.size(); ++a) cnt[a] += tau <= ages[a] + 1e-12;
    }
  });
  for (std::size_t a = 0; a < ages.size(); ++a) {
    const double m = integrate(cfg.id.drift, 0.0, ages[a]);
    const double s = 0.5 * integrate([&](double t) { return cfg.id.vol(t) * cfg.id.vol(t); }, 0.0, ages[a]);
    double q = 0.0;
    if (ages[a] > 0.0) {
      SemParams p = cfg.params;
      p.kappa = m / s;
      q = q_id(m, p);
    }
    out.push_back(make_estimate(ages[a], counts[a], cfg.n_paths, q));
  }
  return out;
}

std::vector<McEstimate> simulate_ig(const SimConfig& cfg, std::span<const double> ages) {
  if (cfg.n_paths < 1) throw Error(ErrorKind::domain, "simulate_ig: n_paths must be positive");
  if (!cfg.lambda) throw Error(ErrorKind::domain, "simulate_ig: no key curve");
  const auto& p = cfg.params;
  std::vector<McEstimate> out;
  for (std::size_t a = 0; a < ages.size(); ++a) {
    const double lam = cfg.lambda(ages[a]);
    if (lam < 0.0) throw Error(ErrorKind::domain, "simulate_ig: negative key value");
    if (lam == 0.0) {
      out.push_back({ages[a], 0.0, 0.0, 0.0});
      continue;
    }
    const auto counts = chunked_counts(cfg.n_paths, 1, cfg.seed + a, 3, [&](auto& rng, std::size_t b, std::size_t e, auto& cnt) {
      for (std::size_t i = b; i < e; ++i) cnt[0] += draw_inverse_gaussian(rng, lam, p.sigma * lam * lam) >= p.x;
    });
    out.push_back(make_estimate(ages[a], counts[0], cfg.n_paths, q_ig(lam, p)));
  }
  return out;
}

std::vector<double> sample_ig_level(const SemParams& p, double lambda_t, std::size_t n, std::uint64_t seed,
                                    std::optional<double> lambda_s) {
  if (lambda_s && !(*lambda_s > 0.0 && *lambda_s < lambda_t))
    throw Error(ErrorKind::domain, "sample_ig_level: split level must lie in (0, lambda_t)");
  std::vector<double> out(n);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    auto rng = chunk_rng(seed, c, 4);
    for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i) {
      if (lambda_s) {
        const double d1 = *lambda_s, d2 = lambda_t - *lambda_s;
        out[i] = draw_inverse_gaussian(rng, d1, p.sigma * d1 * d1) + draw_inverse_gaussian(rng, d2, p.sigma * d2 * d2);
      } else {
        out[i] = draw_inverse_gaussian(rng, lambda_t, p.sigma * lambda_t * lambda_t);
      }
    }
  });
  return out;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::domain, "ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  return d;
}

CohortPanel generate_synthetic_panel(const SyntheticSpec& spec) {
  spec.params.validate();
  const std::size_t m = spec.kind == KeyKind::IG ? spec.ig.size() : spec.id.size();
  if (m == 0) throw Error(ErrorKind::domain, "generate_synthetic_panel: no cohorts");
  const int w = spec.params.terminal_age;
  CohortPanel panel{{}, spec.params};
  std::mt19937_64 rng(spec.seed);
  for (std::size_t c = 0; c < m; ++c) {
    CohortMortality cm{spec.first_cohort + static_cast<int>(c), {}};
    for (int t = 0; t <= w; ++t) {
      double q;
      if (spec.kind == KeyKind::IG) {
        const double lam = spec.ig[c](t);
        if (!(lam >= 0.0) || (t > 0 && lam < spec.ig[c](t - 1)))
          throw Error(ErrorKind::domain, "generate_synthetic_panel: IG key must be nonnegative and increasing");
        q = q_ig(lam, spec.params);
      } else {
        const double m_t = spec.id[c](t);
        if (t > 0 && !(m_t < 0.0))
          throw Error(ErrorKind::domain, "generate_synthetic_panel: ID key must be negative for t > 0");
        q = t == 0 ? 0.0 : q_id(m_t, spec.params);
      }
      cm.q_data.push_back(q);
    }
    if (spec.cohort_size > 0) {
      std::uint64_t alive = spec.cohort_size;
      std::vector<double> sampled{0.0};
      for (int t = 0; t < w; ++t) {
        const double hazard = std::clamp(conditional_unchecked(cm.q_data[static_cast<std::size_t>(t + 1)],
                                                               cm.q_data[static_cast<std::size_t>(t)]), 0.0, 1.0);
        if (alive > 0 && std::isfinite(hazard)) {
          std::binomial_distribution<std::uint64_t> deaths(alive, hazard);
          alive -= deaths(rng);
        }
        sampled.push_back(1.0 - static_cast<double>(alive) / static_cast<double>(spec.cohort_size));
      }
      cm.q_data = std::move(sampled);
    }
    panel.curves.push_back(std::move(cm));
  }
  return panel;
}

}  // namespace sem
