#include "sem/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

namespace sem {

OptimResult nelder_mead(const Objective& f, std::vector<double> x0, std::span<const double> step,
                        const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  const bool boxed = !opts.lower.empty();
  auto clamp_into = [&](std::vector<double>& x) {
    if (!boxed) return;
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], opts.lower[i], opts.upper[i]);
  };
  int evals = 0;
  auto eval = [&](std::vector<double>& x) {
    clamp_into(x);
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? HUGE_VAL : v;
  };

  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  vals[0] = eval(pts[0]);
  if (n == 0) return {pts[0], vals[0], evals, true};
  for (std::size_t i = 0; i < n; ++i) {
    pts[i + 1][i] += step[i];
    // Step back inward if the box pushed the vertex onto the start point.
    if (boxed && std::clamp(pts[i + 1][i], opts.lower[i], opts.upper[i]) == x0[i]) pts[i + 1][i] = x0[i] - step[i];
    vals[i + 1] = eval(pts[i + 1]);
  }

  std::vector<std::size_t> order(n + 1);
  bool converged = false;
  while (evals < opts.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
    const auto& best = pts[order[0]];
    double diameter = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
      for (std::size_t i = 0; i < n; ++i) diameter = std::max(diameter, std::fabs(pts[order[k]][i] - best[i]));
    if (diameter <= opts.xtol || vals[order[n]] - vals[order[0]] < opts.ftol) {
      converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += pts[order[k]][i] / static_cast<double>(n);
    const std::size_t worst = order[n];
    auto along = [&](double coef) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + coef * (pts[worst][i] - centroid[i]);
      return x;
    };

    auto refl = along(-1.0);
    const double f_refl = eval(refl);
    if (f_refl < vals[order[0]]) {
      auto expd = along(-2.0);
      const double f_exp = eval(expd);
      if (f_exp < f_refl) {
        pts[worst] = std::move(expd);
        vals[worst] = f_exp;
      } else {
        pts[worst] = std::move(refl);
        vals[worst] = f_refl;
      }
      continue;
    }
    if (f_refl < vals[order[n - 1]]) {
      pts[worst] = std::move(refl);
      vals[worst] = f_refl;
      continue;
    }
    const bool outside = f_refl < vals[worst];
    auto contr = along(outside ? -0.5 : 0.5);
    const double f_con = eval(contr);
    if (f_con < (outside ? f_refl : vals[worst])) {
      pts[worst] = std::move(contr);
      vals[worst] = f_con;
      continue;
    }
    const auto anchor = pts[order[0]];
    for (std::size_t k = 1; k <= n; ++k) {
      auto& p = pts[order[k]];
      for (std::size_t i = 0; i < n; ++i) p[i] = anchor[i] + 0.5 * (p[i] - anchor[i]);
      vals[order[k]] = eval(p);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  return {pts[best], vals[best], evals, converged};
}

namespace {

Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x, int& evals) {
  Eigen::VectorXd g(x.size());
  std::vector<double> probe(x.data(), x.data() + x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::fabs(x[i]));
    probe[static_cast<std::size_t>(i)] = x[i] + h;
    const double up = f(probe);
    probe[static_cast<std::size_t>(i)] = x[i] - h;
    const double down = f(probe);
    probe[static_cast<std::size_t>(i)] = x[i];
    evals += 2;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace

OptimResult bfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& opts) {
  const auto n = static_cast<Eigen::Index>(x0.size());
  int evals = 0;
  auto call = [&](const Eigen::VectorXd& v) {
    ++evals;
    const double r = f(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
    return std::isfinite(r) ? r : HUGE_VAL;
  };
  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(x0.data(), n);
  double fx = call(x);
  if (n == 0) return {x0, fx, evals, true};
  Eigen::VectorXd g = numeric_gradient(f, x, evals);
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  bool converged = false;
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (!g.allFinite()) break;
    if (g.lpNorm<Eigen::Infinity>() <= opts.gtol * (1.0 + std::fabs(fx))) {
      converged = true;
      break;
    }
    Eigen::VectorXd dir = -h_inv * g;
    if (dir.dot(g) >= 0.0) {
      h_inv.setIdentity();
      dir = -g;
    }
    double step = 1.0;
    Eigen::VectorXd x_new;
    double f_new = HUGE_VAL;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      x_new = x + step * dir;
      f_new = call(x_new);
      if (f_new <= fx + 1e-4 * step * g.dot(dir)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      converged = true;  // no descent possible at gradient resolution
      break;
    }
    const Eigen::VectorXd g_new = numeric_gradient(f, x_new, evals);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    const double rel_change = std::fabs(fx - f_new) / (1.0 + std::fabs(fx));
    x = x_new;
    fx = f_new;
    g = g_new;
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      h_inv = (id - rho * s * y.transpose()) * h_inv * (id - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    if (rel_change < 1e-15) {
      converged = true;
      break;
    }
  }
  return {std::vector<double>(x.data(), x.data() + n), fx, evals, converged};
}

}  // namespace sem
