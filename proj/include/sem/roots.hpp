#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "sem/error.hpp"

namespace sem {

struct RootResult {
  double root;
  int iterations;
};

/// Brent's zeroin on a bracket [a, b] with f(a)·f(b) <= 0. Interpolation
/// steps (secant or inverse quadratic) fall back to bisection whenever they
/// leave the bracket or shrink it too slowly. Terminates when f hits zero or
/// the bracket is narrower than 2·eps·|b| + abs_tol.
template <class F>
RootResult brent_root(F&& f, double a, double b, double abs_tol = 0.0, int max_iter = 300) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return {a, 0};
  if (fb == 0.0) return {b, 0};
  if ((fa > 0.0) == (fb > 0.0))
    throw Error(ErrorKind::invariant, "brent_root: interval does not bracket a root");

  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 1; iter <= max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2.0 * eps * std::fabs(b) + 0.5 * abs_tol;
    const double half = 0.5 * (c - b);
    if (std::fabs(half) <= tol || fb == 0.0) return {b, iter};

    if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
      double pnum, qden;
      const double s = fb / fa;
      if (a == c) {
        pnum = 2.0 * half * s;
        qden = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        pnum = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
        qden = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (pnum > 0.0) qden = -qden;
      pnum = std::fabs(pnum);
      const double min1 = 3.0 * half * qden - std::fabs(tol * qden);
      const double min2 = std::fabs(e * qden);
      if (2.0 * pnum < std::min(min1, min2)) {
        e = d;
        d = pnum / qden;
      } else {
        d = half;
        e = d;
      }
    } else {
      d = half;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::fabs(d) > tol ? d : (half > 0.0 ? tol : -tol);
    fb = f(b);
  }
  return {b, max_iter};
}

}  // namespace sem
