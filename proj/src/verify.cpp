#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <boost/math/distributions/inverse_gaussian.hpp>

#include "sem/basis_smooth.hpp"
#include "sem/error.hpp"
#include "sem/fpca.hpp"
#include "sem/key_inversion.hpp"
#include "sem/pipeline.hpp"
#include "sem/text.hpp"

namespace sem {

namespace {

using text::fmt;

struct Reporter {
  std::ostream& log;
  bool ok = true;
  void line(bool pass, const std::string& name, const std::string& detail) {
    ok = ok && pass;
    log << (pass ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
  }
};

// The shipped closed form, or a copy with the sign of the reflected term
// flipped when the verify fault is injected.
double q_ig_under_test(double lam, const SemParams& p, bool fault) {
  if (!fault) return q_ig(lam, p);
  const double scale = std::sqrt(p.sigma / p.x);
  return std::clamp(norm_cdf(scale * (lam - p.x)) + std::exp(2.0 * p.sigma * lam + log_norm_cdf(-scale * (lam + p.x))), 0.0, 1.0);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

bool run_verify(const RunConfig& cfg, std::ostream& log) {
  Reporter rep{log};
  const bool fault = cfg.verify_fault == "ig_sign";
  std::mt19937_64 rng(cfg.seed);
  std::ostringstream summary;
  summary << "kind\tage\tp_hat\tse\tq_closed_form\n";
  char buf[256];

  {
    // IG closed form against the inverse-Gaussian CDF, P(T <= x) with mean Lambda, shape sigma Lambda^2.
    const auto t0 = std::chrono::steady_clock::now();
    std::uniform_real_distribution<double> ux(10.0, 5000.0), us(1e-4, 1e-2), ur(0.05, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      SemParams p;
      p.x = ux(rng);
      p.sigma = us(rng);
      const double lam = ur(rng) * p.x;
      const boost::math::inverse_gaussian_distribution<long double> ig(lam, static_cast<long double>(p.sigma) * lam * lam);
      const double ref = static_cast<double>(cdf(complement(ig, static_cast<long double>(p.x))));
      worst = std::max(worst, std::fabs(q_ig_under_test(lam, p, fault) - ref));
    }
    const double secs = seconds_since(t0);
    std::snprintf(buf, sizeof buf, "1000 random triples, max |diff| %.3e (tol 1e-10), %.3f s", worst, secs);
    rep.line(worst < 1e-10, "ig_closed_form", buf);
  }

  {
    // ID first passage of x + mu t + v W(t) through zero.
    const auto t0 = std::chrono::steady_clock::now();
    const double configs[10][4] = {{1.0, -0.2, 1.0, 5.0},  {1.0, -0.5, 1.0, 2.0},  {2.0, -0.3, 1.0, 8.0},
                                   {0.5, -0.1, 0.5, 3.0},  {3.0, -1.0, 2.0, 2.5},  {1.0, -0.05, 0.3, 10.0},
                                   {5.0, -0.8, 1.5, 6.0},  {2.0, -0.4, 0.8, 4.0},  {1.5, -0.25, 1.2, 1.0},
                                   {4.0, -0.6, 1.0, 7.0}};
    int inside = 0;
    for (std::size_t i = 0; i < 10; ++i) {
      const auto& c = configs[i];
      SimConfig sc;
      sc.kind = KeyKind::ID;
      sc.params.x = c[0];
      sc.params.kappa = 2.0 * c[1] / (c[2] * c[2]);
      sc.id.mu = c[1];
      sc.id.v = c[2];
      sc.n_paths = cfg.verify_paths;
      sc.seed = cfg.seed + i;
      const std::vector<double> ages{c[3]};
      const auto e = simulate_id_hitting(sc, ages)[0];
      inside += e.within(3.0);
      summary << "ID\t" << fmt(e.age) << '\t' << fmt(e.p_hat) << '\t' << fmt(e.se) << '\t' << fmt(e.q_closed_form) << '\n';
    }
    std::snprintf(buf, sizeof buf, "%d/10 configurations within 3 SE at n=%zu (need >= 9), %.1f s", inside, cfg.verify_paths,
                  seconds_since(t0));
    rep.line(inside >= 9, "id_monte_carlo", buf);
  }

  {
    const auto t0 = std::chrono::steady_clock::now();
    SimConfig sc;
    sc.kind = KeyKind::IG;
    sc.params = cfg.params;
    const IgFamily fam{0.07, 1.0};
    sc.lambda = fam;
    sc.n_paths = cfg.verify_paths;
    sc.seed = cfg.seed + 100;
    const std::vector<double> ages{40.0, 60.0, 80.0, 90.0, 100.0};
    const auto est = simulate_ig(sc, ages);
    int inside = 0;
    double worst_cf = 0.0;
    for (const auto& e : est) {
      inside += e.within(3.0);
      worst_cf = std::max(worst_cf, std::fabs(e.q_closed_form - q_ig_under_test(fam(e.age), sc.params, fault)));
      summary << "IG\t" << fmt(e.age) << '\t' << fmt(e.p_hat) << '\t' << fmt(e.se) << '\t' << fmt(e.q_closed_form) << '\n';
    }
    std::snprintf(buf, sizeof buf, "%d/5 ages within 3 SE at n=%zu, %.1f s", inside, cfg.verify_paths, seconds_since(t0));
    rep.line(inside == 5 && worst_cf < 1e-12, "ig_monte_carlo", buf);
  }

  {
    // Known key curve -> mortality -> inversion -> mortality.
    const auto& p = cfg.params;
    double worst_q = 0.0, worst_key = 0.0;
    std::uniform_real_distribution<double> ua(0.05, 0.08), ub(0.5, 2.0), ud(-8.0, -3.0);
    for (int r = 0; r < 10; ++r) {
      for (KeyKind kind : {KeyKind::IG, KeyKind::ID}) {
        const double a = ua(rng), b = ub(rng), d = ud(rng);
        auto key = [&](int t) {
          if (kind == KeyKind::IG) return std::exp(a * t) + b * t - 1.0;
          return t < p.cond_age ? -500.0 * (t + 1) / (p.cond_age + 1) : -500.0 + d * (t - p.cond_age);
        };
        CohortMortality cm;
        cm.cohort = r;
        for (int t = 0; t <= p.terminal_age; ++t) cm.q_data.push_back(q_key(kind, key(t), p));
        const auto kp = estimate_keys(cm, kind, p);
        const double qs = cm.q(p.cond_age);
        for (std::size_t i = 0; i < kp.ages.size(); ++i) {
          const int t = kp.ages[i];
          if (cm.q(t) >= kCondCap || cm.q(t) < 1e-300) continue;
          const double back = conditional_unchecked(q_key(kind, kp.values[i], p), q_key(kind, kp.key_at_s, p));
          worst_q = std::max(worst_q, std::fabs(back - conditional_unchecked(cm.q(t), qs)));
          worst_key = std::max(worst_key, std::fabs(kp.values[i] - key(t)) / std::fabs(key(t)));
        }
      }
    }
    std::snprintf(buf, sizeof buf, "20 curves, max |dq| %.3e (tol 1e-10), max rel key error %.3e (tol 1e-7)", worst_q, worst_key);
    rep.line(worst_q < 1e-10 && worst_key < 1e-7, "inversion_round_trip", buf);
  }

  {
    // Planted functional modes; eigenfunctions must be W-orthonormal.
    const auto basis = make_basis(cfg.params.cond_age, cfg.params.terminal_age, cfg.basis_size, cfg.order);
    const int m = 200, l = basis.size();
    Eigen::MatrixXd coeffs(m, l);
    std::normal_distribution<double> nd;
    std::vector<int> cohorts;
    for (int i = 0; i < m; ++i) {
      coeffs.row(i).setZero();
      for (int j = 0; j < 3 && j < l; ++j) coeffs(i, j * 3 + 1) = nd(rng) * std::pow(0.3, j) * 10.0;
      cohorts.push_back(i);
    }
    const auto model = fit_fpca(center(basis, cohorts, coeffs), 1.0);
    const Eigen::MatrixXd gram = model.eig_coeffs.transpose() * basis.gram() * model.eig_coeffs;
    const double orth = (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    std::snprintf(buf, sizeof buf, "rank %d, max |E^T W E - I| %.3e (tol 1e-8)", model.rank(), orth);
    rep.line(orth < 1e-8, "fpca_orthonormality", buf);
  }

  {
    // Random walk with drift: point forecasts x_n + h c, variances h sigma^2.
    std::normal_distribution<double> nd;
    std::vector<double> y{0.0};
    for (int i = 1; i < 60; ++i) y.push_back(y.back() + 0.5 + nd(rng));
    const auto spec = fit_arima_order(y, 0, 1, 0, true);
    const std::vector<double> deltas{0.95};
    const auto fc = forecast(spec, y, 10, deltas);
    double worst = 0.0;
    for (int h = 1; h <= 10; ++h) {
      const auto u = static_cast<std::size_t>(h - 1);
      worst = std::max(worst, std::fabs(fc.points[u] - (y.back() + h * spec.intercept)));
      worst = std::max(worst, std::fabs(fc.variances[u] - h * spec.sigma2));
    }
    std::snprintf(buf, sizeof buf, "random walk with drift, max deviation from closed form %.3e (tol 1e-10)", worst);
    rep.line(worst < 1e-10, "arima_closed_form", buf);
  }

  if (!cfg.output_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    std::ofstream out(cfg.output_dir / "verify_summary.tsv", std::ios::binary);
    out << summary.str();
    if (!out) throw Error(ErrorKind::io, "cannot write " + (cfg.output_dir / "verify_summary.tsv").string());
    std::ofstream man(cfg.output_dir / "manifest_verify.ini", std::ios::binary);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(file_hash(cfg.output_dir / "verify_summary.tsv")));
    man << cfg.echo() << "\n[manifest]\nsubcommand = verify\nformat = sem-manifest v1\ninputs = \noutputs = verify_summary.tsv:" << hex
        << "\nresult = " << (rep.ok ? "pass" : "fail") << "\n";
  }
  log << (rep.ok ? "verify: all oracles passed\n" : "verify: oracle failure\n");
  return rep.ok;
}

}  // namespace sem
