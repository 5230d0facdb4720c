#pragma once

#include <span>
#include <vector>

namespace sem {

/// ARIMA(p,d,q) with an optional constant, fitted by conditional sum of
/// squares. The constant is the mean of the d-times differenced series
/// (level for d=0, drift for d=1); d=2 models carry none.
struct ArimaSpec {
  int p = 0, d = 0, q = 0;
  std::vector<double> phi;       // AR coefficients
  std::vector<double> theta_ma;  // MA coefficients, 1 + theta_1 B + ...
  bool has_intercept = true;
  double intercept = 0.0;
  double sigma2 = 0.0;
  double aicc = 0.0;
  int n_used = 0;                // residuals entering the sum of squares
  bool fallback = false;         // every candidate was inadmissible
};

struct ArimaSearch {
  int max_p = 2, max_d = 2, max_q = 2;
};

/// KPSS level-stationarity statistic with Bartlett long-run variance.
double kpss_statistic(std::span<const double> series, int lags);

/// Number of differences (0..max_d) chosen by KPSS at the 5% level, each
/// accepted only if it also lowers the sample variance.
int choose_differencing(std::span<const double> series, int max_d);

/// CSS fit of a fixed order. `conditioning` is the number of leading
/// differenced observations whose residuals are not summed (>= p).
ArimaSpec fit_arima_order(std::span<const double> series, int p, int d, int q, bool with_constant,
                          int conditioning = -1);

/// Automatic order selection: d first, then (p, q) by AICc.
ArimaSpec fit_arima(std::span<const double> series, const ArimaSearch& search = {});

/// Whether all AR and MA roots lie outside the circle of radius 1 + 1e-6.
bool is_admissible(const ArimaSpec& spec);

/// Psi weights psi_0..psi_{n-1} of the full (integrated) model.
std::vector<double> psi_weights(const ArimaSpec& spec, int n);

struct PredictionInterval {
  double delta = 0.95;
  std::vector<double> lower;
  std::vector<double> upper;
};

struct ScoreForecast {
  int component = 0;
  int horizon = 0;
  std::vector<double> points;
  std::vector<double> variances;  // forecast-error variances
  std::vector<PredictionInterval> intervals;

  const PredictionInterval& interval(double delta) const;
};

/// h-step point forecasts and Gaussian delta-prediction intervals.
ScoreForecast forecast(const ArimaSpec& spec, std::span<const double> series, int h,
                       std::span<const double> deltas, int component = 0);

/// Standard normal quantile.
double norm_quantile(double p);

}  // namespace sem
