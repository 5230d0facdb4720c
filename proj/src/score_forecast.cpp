#include "sem/score_forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

#include "sem/error.hpp"
#include "sem/optimize.hpp"

namespace sem {

namespace {

constexpr double kKpssCritical5 = 0.463;

std::vector<double> difference(std::span<const double> x, int d) {
  std::vector<double> w(x.begin(), x.end());
  for (int k = 0; k < d; ++k) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i) w[i] = w[i + 1] - w[i];
    if (!w.empty()) w.pop_back();
  }
  return w;
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

// Partial autocorrelations -> stationary AR coefficients (Durbin-Levinson).
std::vector<double> pacf_to_ar(std::span<const double> r) {
  std::vector<double> phi;
  for (std::size_t k = 0; k < r.size(); ++k) {
    std::vector<double> next(k + 1);
    for (std::size_t j = 0; j < k; ++j) next[j] = phi[j] - r[k] * phi[k - 1 - j];
    next[k] = r[k];
    phi = std::move(next);
  }
  return phi;
}

// Largest modulus among reciprocal roots of 1 - c_1 z - ... - c_n z^n.
double max_reciprocal_root(std::span<const double> c) {
  const auto n = static_cast<Eigen::Index>(c.size());
  if (n == 0) return 0.0;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) comp(0, j) = c[static_cast<std::size_t>(j)];
  for (Eigen::Index i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  return Eigen::EigenSolver<Eigen::MatrixXd>(comp, false).eigenvalues().cwiseAbs().maxCoeff();
}

// Coefficients of phi(B)(1-B)^d, leading 1 included.
std::vector<double> integrated_ar_polynomial(const ArimaSpec& spec) {
  std::vector<double> poly(spec.phi.size() + 1);
  poly[0] = 1.0;
  for (std::size_t i = 0; i < spec.phi.size(); ++i) poly[i + 1] = -spec.phi[i];
  for (int k = 0; k < spec.d; ++k) {
    std::vector<double> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i];
      next[i + 1] -= poly[i];
    }
    poly = std::move(next);
  }
  return poly;
}

struct CssProblem {
  std::vector<double> w;
  int p, q;
  bool constant;
  int conditioning;
  double scale;  // spread of w, for conditioning the intercept parameter
  double centre;

  struct Params {
    std::vector<double> phi, theta;
    double mu;
  };

  Params unpack(std::span<const double> u) const {
    std::vector<double> r(static_cast<std::size_t>(p)), s(static_cast<std::size_t>(q));
    for (int i = 0; i < p; ++i) r[static_cast<std::size_t>(i)] = std::tanh(u[static_cast<std::size_t>(i)]);
    for (int j = 0; j < q; ++j) s[static_cast<std::size_t>(j)] = std::tanh(u[static_cast<std::size_t>(p + j)]);
    Params out{pacf_to_ar(r), pacf_to_ar(s), 0.0};
    for (double& t : out.theta) t = -t;
    out.mu = constant ? centre + scale * u[static_cast<std::size_t>(p + q)] : 0.0;
    return out;
  }

  std::vector<double> residuals(const Params& par) const {
    std::vector<double> e(w.size(), 0.0);
    for (std::size_t t = static_cast<std::size_t>(conditioning); t < w.size(); ++t) {
      double v = w[t] - par.mu;
      for (int i = 1; i <= p; ++i) v -= par.phi[static_cast<std::size_t>(i - 1)] * (w[t - static_cast<std::size_t>(i)] - par.mu);
      for (int j = 1; j <= q; ++j)
        if (t >= static_cast<std::size_t>(j)) v -= par.theta[static_cast<std::size_t>(j - 1)] * e[t - static_cast<std::size_t>(j)];
      e[t] = v;
    }
    return e;
  }

  double css(std::span<const double> u) const {
    const auto e = residuals(unpack(u));
    double ss = 0.0;
    for (std::size_t t = static_cast<std::size_t>(conditioning); t < e.size(); ++t) ss += e[t] * e[t];
    return ss;
  }
};

}  // namespace

double kpss_statistic(std::span<const double> series, int lags) {
  const auto n = series.size();
  if (n < 2) throw Error(ErrorKind::domain, "kpss_statistic: series too short");
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = series[i] - mean;
  double partial = 0.0, eta = 0.0;
  for (double v : e) {
    partial += v;
    eta += partial * partial;
  }
  auto gamma = [&](std::size_t j) {
    double s = 0.0;
    for (std::size_t t = j; t < n; ++t) s += e[t] * e[t - j];
    return s / static_cast<double>(n);
  };
  double lrv = gamma(0);
  for (int j = 1; j <= lags && static_cast<std::size_t>(j) < n; ++j)
    lrv += 2.0 * (1.0 - j / (lags + 1.0)) * gamma(static_cast<std::size_t>(j));
  if (!(lrv > 0.0)) return 0.0;
  return eta / (static_cast<double>(n) * static_cast<double>(n) * lrv);
}

int choose_differencing(std::span<const double> series, int max_d) {
  std::vector<double> x(series.begin(), series.end());
  int d = 0;
  while (d < max_d && x.size() >= 12) {
    const int lags = static_cast<int>(3.0 * std::sqrt(static_cast<double>(x.size())) / 13.0);
    if (kpss_statistic(x, lags) <= kKpssCritical5) break;
    auto next = difference(x, 1);
    if (!(sample_variance(next) < sample_variance(x))) break;
    x = std::move(next);
    ++d;
  }
  return d;
}

ArimaSpec fit_arima_order(std::span<const double> series, int p, int d, int q, bool with_constant,
                          int conditioning) {
  if (p < 0 || d < 0 || q < 0) throw Error(ErrorKind::domain, "ARIMA orders must be nonnegative");
  if (d >= 2) with_constant = false;
  if (conditioning < 0) conditioning = p;
  if (conditioning < p) throw Error(ErrorKind::domain, "ARIMA conditioning must cover the AR order");
  auto w = difference(series, d);
  const int k_params = p + q + (with_constant ? 1 : 0);
  const int n_used = static_cast<int>(w.size()) - conditioning;
  if (static_cast<int>(w.size()) < 10 || n_used <= k_params + 2)
    throw Error(ErrorKind::domain, "ARIMA: series too short (" + std::to_string(series.size()) +
                                       " observations) for order (" + std::to_string(p) + "," +
                                       std::to_string(d) + "," + std::to_string(q) + ")");

  const double centre = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  const double spread = std::sqrt(sample_variance(w));
  CssProblem prob{std::move(w), p, q, with_constant, conditioning, spread > 0.0 ? spread : 1.0, centre};
  Objective obj = [&prob](std::span<const double> u) { return prob.css(u); };

  std::vector<double> u0(static_cast<std::size_t>(k_params), 0.0);
  std::vector<double> step(u0.size(), 0.3);
  NelderMeadOptions nm;
  nm.xtol = 1e-7;
  nm.max_evaluations = 4000;
  auto coarse = nelder_mead(obj, u0, step, nm);
  auto polished = bfgs(obj, coarse.x);
  const auto& best = polished.f <= coarse.f ? polished : coarse;

  const auto par = prob.unpack(best.x);
  ArimaSpec spec;
  spec.p = p;
  spec.d = d;
  spec.q = q;
  spec.phi = par.phi;
  spec.theta_ma = par.theta;
  spec.has_intercept = with_constant;
  spec.intercept = par.mu;
  spec.n_used = n_used;
  spec.sigma2 = std::max(best.f / n_used, std::numeric_limits<double>::min());
  const double loglik = -0.5 * n_used * (std::log(2.0 * std::numbers::pi * spec.sigma2) + 1.0);
  const int k = k_params + 1;
  spec.aicc = -2.0 * loglik + 2.0 * k + 2.0 * k * (k + 1.0) / (n_used - k - 1.0);
  return spec;
}

bool is_admissible(const ArimaSpec& spec) {
  constexpr double limit = 1.0 / (1.0 + 1e-6);
  std::vector<double> ma(spec.theta_ma.size());
  for (std::size_t j = 0; j < ma.size(); ++j) ma[j] = -spec.theta_ma[j];
  return max_reciprocal_root(spec.phi) < limit && max_reciprocal_root(ma) < limit &&
         spec.sigma2 > 0.0 && std::isfinite(spec.sigma2);
}

ArimaSpec fit_arima(std::span<const double> series, const ArimaSearch& search) {
  if (series.size() < 10) throw Error(ErrorKind::domain, "ARIMA: series too short");
  const int d = choose_differencing(series, search.max_d);
  if (static_cast<int>(series.size()) - d < 10)
    throw Error(ErrorKind::domain, "ARIMA: fewer than 10 observations after differencing");

  ArimaSpec best;
  bool found = false;
  for (int p = 0; p <= search.max_p; ++p) {
    for (int q = 0; q <= search.max_q; ++q) {
      ArimaSpec cand;
      try {
        cand = fit_arima_order(series, p, d, q, d < 2, search.max_p);
      } catch (const Error&) {
        continue;
      }
      if (!is_admissible(cand)) continue;
      if (!found || cand.aicc < best.aicc - 1e-12) {
        best = cand;
        found = true;
      }
    }
  }
  if (!found) {
    best = fit_arima_order(series, 0, 1, 0, true);
    best.fallback = true;
  }
  return best;
}

std::vector<double> psi_weights(const ArimaSpec& spec, int n) {
  const auto poly = integrated_ar_polynomial(spec);
  std::vector<double> psi(static_cast<std::size_t>(std::max(n, 0)), 0.0);
  for (int j = 0; j < n; ++j) {
    double v = j == 0 ? 1.0 : (j <= spec.q ? spec.theta_ma[static_cast<std::size_t>(j - 1)] : 0.0);
    for (int i = 1; i < static_cast<int>(poly.size()) && i <= j; ++i)
      v -= poly[static_cast<std::size_t>(i)] * psi[static_cast<std::size_t>(j - i)];
    psi[static_cast<std::size_t>(j)] = v;
  }
  return psi;
}

double norm_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

const PredictionInterval& ScoreForecast::interval(double delta) const {
  for (const auto& iv : intervals)
    if (std::fabs(iv.delta - delta) < 1e-12) return iv;
  throw Error(ErrorKind::domain, "no prediction interval at delta=" + std::to_string(delta));
}

ScoreForecast forecast(const ArimaSpec& spec, std::span<const double> series, int h,
                       std::span<const double> deltas, int component) {
  if (h < 1) throw Error(ErrorKind::domain, "forecast: horizon must be at least 1");
  for (double delta : deltas)
    if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::domain, "forecast: delta must lie in (0, 1)");
  if (static_cast<int>(series.size()) <= spec.d + spec.p)
    throw Error(ErrorKind::domain, "forecast: series shorter than the model order");

  // In-sample residuals on the differenced scale, aligned to series indices.
  const auto w = difference(series, spec.d);
  const int cond = std::min(static_cast<int>(w.size()), std::max(spec.p, static_cast<int>(w.size()) - spec.n_used));
  std::vector<double> e(series.size(), 0.0);
  {
    const double mu = spec.has_intercept ? spec.intercept : 0.0;
    std::vector<double> ew(w.size(), 0.0);
    for (std::size_t t = static_cast<std::size_t>(cond); t < w.size(); ++t) {
      double v = w[t] - mu;
      for (int i = 1; i <= spec.p; ++i) v -= spec.phi[static_cast<std::size_t>(i - 1)] * (w[t - static_cast<std::size_t>(i)] - mu);
      for (int j = 1; j <= spec.q; ++j)
        if (t >= static_cast<std::size_t>(j)) v -= spec.theta_ma[static_cast<std::size_t>(j - 1)] * ew[t - static_cast<std::size_t>(j)];
      ew[t] = v;
    }
    for (std::size_t t = 0; t < ew.size(); ++t) e[t + static_cast<std::size_t>(spec.d)] = ew[t];
  }

  // Recursion on the original scale: phi*(B) x_t = c + theta(B) e_t.
  const auto poly = integrated_ar_polynomial(spec);
  std::vector<double> full_ar(poly.begin() + 1, poly.end());
  for (double& c : full_ar) c = -c;
  const double phi_sum = std::accumulate(spec.phi.begin(), spec.phi.end(), 0.0);
  const double constant = spec.has_intercept ? spec.intercept * (1.0 - phi_sum) : 0.0;

  std::vector<double> x(series.begin(), series.end());
  const std::size_t n = x.size();
  x.resize(n + static_cast<std::size_t>(h), 0.0);
  e.resize(n + static_cast<std::size_t>(h), 0.0);
  for (std::size_t t = n; t < n + static_cast<std::size_t>(h); ++t) {
    double v = constant;
    for (std::size_t i = 1; i <= full_ar.size(); ++i) v += full_ar[i - 1] * x[t - i];
    for (int j = 1; j <= spec.q; ++j) v += spec.theta_ma[static_cast<std::size_t>(j - 1)] * e[t - static_cast<std::size_t>(j)];
    x[t] = v;
  }

  ScoreForecast out;
  out.component = component;
  out.horizon = h;
  out.points.assign(x.begin() + static_cast<std::ptrdiff_t>(n), x.end());
  const auto psi = psi_weights(spec, h);
  double acc = 0.0;
  for (int k = 0; k < h; ++k) {
    acc += psi[static_cast<std::size_t>(k)] * psi[static_cast<std::size_t>(k)];
    out.variances.push_back(spec.sigma2 * acc);
  }
  for (double delta : deltas) {
    PredictionInterval iv{delta, {}, {}};
    const double z = norm_quantile(0.5 * (1.0 + delta));
    for (int k = 0; k < h; ++k) {
      const double half = z * std::sqrt(out.variances[static_cast<std::size_t>(k)]);
      iv.lower.push_back(out.points[static_cast<std::size_t>(k)] - half);
      iv.upper.push_back(out.points[static_cast<std::size_t>(k)] + half);
    }
    out.intervals.push_back(std::move(iv));
  }
  return out;
}

}  // namespace sem
