#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sem/error.hpp"
#include "sem/sem_core.hpp"

using namespace sem;

TEST_CASE("norm_cdf reference values") {
  CHECK(norm_cdf(0.0) == 0.5);
  CHECK(std::fabs(norm_cdf(40.0) - 1.0) < 1e-14);
  CHECK(std::fabs(norm_cdf(1.0) - static_cast<double>(sem_test::phi_series(1.0L))) < 1e-13);
  CHECK(std::fabs(norm_cdf(-1.3) - static_cast<double>(sem_test::phi_series(-1.3L))) < 1e-14);
}

TEST_CASE("norm_cdf is monotone") {
  double prev = 0.0;
  for (double z = -40.0; z <= 40.0; z += 0.01) {
    const double v = norm_cdf(z);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("log_norm_cdf against tail series and direct evaluation") {
  CHECK(log_norm_cdf(0.0) == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  for (double z : {-10.0, -12.5, -20.0, -30.0, -37.0, -60.0}) {
    const double ref = sem_test::log_phi_tail_series(z);
    CHECK(std::fabs(log_norm_cdf(z) - ref) / std::fabs(ref) < 1e-10);
  }
  CHECK(std::fabs(log_norm_cdf(5.0) - std::log(norm_cdf(5.0))) < 1e-12);
  // Branch boundary: erfc is still accurate just above -8.
  for (double z : {-8.01, -7.99, -8.0}) {
    const double direct = std::log(0.5 * std::erfc(-z / std::sqrt(2.0)));
    CHECK(std::fabs(log_norm_cdf(z) - direct) / std::fabs(direct) < 1e-12);
  }
}

TEST_CASE("q_id limits and domain") {
  const SemParams p;
  CHECK(q_id(-1e-9, p) < 1e-12);
  CHECK(q_id(-1e9, p) > 1.0 - 1e-12);
  CHECK_THROWS_AS(q_id(0.0, p), Error);
  CHECK_THROWS_AS(q_id(5.0, p), Error);
}

TEST_CASE("q_id equals the Brownian first-passage reflection formula") {
  SemParams p;
  p.x = 1.0;
  p.kappa = -0.2;
  const double m = -0.5;
  // mu t = M and sigma^2 t = 2M/kappa with t = 1.
  const double ref = sem_test::brownian_first_passage(1.0, m, std::sqrt(2.0 * m / p.kappa), 1.0);
  CHECK(std::fabs(q_id(m, p) - ref) < 1e-12);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(0.5, 5.0), umu(-2.0, -0.05), uv(0.3, 3.0), ut(0.1, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double x = ux(rng), mu = umu(rng), v = uv(rng), t = ut(rng);
    SemParams q;
    q.x = x;
    q.kappa = 2.0 * mu / (v * v);
    if (-2.0 * mu * x / (v * v) > 600) continue;  // keep the naive oracle finite
    CHECK(std::fabs(q_id(mu * t, q) - sem_test::brownian_first_passage(x, mu, v, t)) < 1e-12);
  }
}

TEST_CASE("q_ig matches the inverse-Gaussian distribution function") {
  const SemParams p;
  CHECK(q_ig(0.0, p) == 0.0);
  CHECK(std::fabs(q_ig(800.0, p) - sem_test::ig_survival(p.x, 800.0, p.sigma * 800.0 * 800.0)) < 1e-10);
  CHECK(std::fabs(q_ig(1e6, p) - 1.0) < 1e-12);
  CHECK_THROWS_AS(q_ig(-1.0, p), Error);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(1.0, 1e4), us(1e-4, 1e-2), uf(0.0, 5.0);
  for (int i = 0; i < 300; ++i) {
    SemParams q;
    q.x = ux(rng);
    q.sigma = us(rng);
    const double lam = uf(rng) * q.x;
    if (lam == 0.0) continue;
    CHECK(std::fabs(q_ig(lam, q) - sem_test::ig_survival(q.x, lam, q.sigma * lam * lam)) < 1e-10);
  }
}

TEST_CASE("q functions are strictly monotone in the key") {
  const SemParams p;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    // Keys spread over the range where q moves away from 0 and 1.
    double a = -std::exp(std::log(10.0) + u(rng) * std::log(3e3));
    double b = -std::exp(std::log(10.0) + u(rng) * std::log(3e3));
    if (a > b) std::swap(a, b);
    if (a == b) continue;
    const double qa = q_id(a, p), qb = q_id(b, p);
    if (qa > 1e-300 && qa < 1.0 - 1e-15) {
      CHECK(qa > qb);
      ++checked;
    } else {
      CHECK(qa >= qb);
    }
    double l1 = u(rng) * 5000.0, l2 = u(rng) * 5000.0;
    if (l1 > l2) std::swap(l1, l2);
    if (l1 < l2) CHECK(q_ig(l1, p) < q_ig(l2, p));
  }
  CHECK(checked > 300);
}

TEST_CASE("extreme keys stay in [0,1]") {
  const SemParams p;
  for (double m : {-1e-300, -1e-12, -1e-3, -1.0, -1e3, -1e6, -1e12, -1e300}) {
    const double v = q_id(m, p);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  for (double l : {0.0, 1e-300, 1e-6, 1.0, 1e3, 1e6, 1e12, 1e300}) {
    const double v = q_ig(l, p);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("conditional mortality") {
  CHECK(conditional(0.3, 0.3) == 0.0);
  CHECK(conditional(1.0, 0.3) == 1.0);
  CHECK(conditional(0.5, 0.2) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK_THROWS_AS(conditional(1.0, 1.0), Error);
  CHECK_THROWS_AS(conditional(0.1, 0.2), Error);
}

TEST_CASE("SemParams validation") {
  SemParams p;
  CHECK_NOTHROW(p.validate());
  p.kappa = 0.1;
  CHECK_THROWS_AS(p.validate(), Error);
  p = SemParams{};
  p.cond_age = 110;
  CHECK_THROWS_AS(p.validate(), Error);
}
