#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "sem/error.hpp"
#include "sem/key_inversion.hpp"

using namespace sem;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

CohortMortality from_key(KeyKind kind, const SemParams& p, auto key) {
  CohortMortality cm{1800, {}};
  for (int a = 0; a <= p.terminal_age; ++a) cm.q_data.push_back(q_key(kind, key(a), p));
  return cm;
}

}  // namespace

TEST_CASE("anchor examples") {
  const SemParams p;
  CohortMortality cm{1800, std::vector<double>(21, 0.0)};
  CHECK(anchor_key_at_s(cm, KeyKind::IG, p) == 0.0);
  cm.q_data[20] = q_ig(150.0, p);
  CHECK(rel(anchor_key_at_s(cm, KeyKind::IG, p), 150.0) < 1e-8);
  for (double m : {-300.0, -500.0, -800.0, -1500.0}) {
    cm.q_data[20] = q_id(m, p);
    CHECK(rel(anchor_key_at_s(cm, KeyKind::ID, p), m) < 1e-8);
  }
  // q_id(-50) ~ exp(-1128) underflows: the data carry no information and the
  // anchor falls back to the boundary clamp.
  cm.q_data[20] = q_id(-50.0, p);
  CHECK(cm.q_data[20] == 0.0);
  CHECK(anchor_key_at_s(cm, KeyKind::ID, p) == id_boundary_key(p));
  cm.q_data[20] = 1.0;
  CHECK_THROWS_AS(anchor_key_at_s(cm, KeyKind::IG, p), Error);
}

TEST_CASE("zero conditional mortality maps to the zero key") {
  const SemParams p;
  std::vector<int> ages;
  std::vector<double> cond;
  for (int t = 20; t <= 110; ++t) {
    ages.push_back(t);
    cond.push_back(0.0);
  }
  const auto kp = invert_pointwise(ages, cond, 0.0, KeyKind::IG, p);
  for (double v : kp.values) CHECK(v == 0.0);
}

TEST_CASE("IG parametric family is recovered") {
  const SemParams p;
  auto lambda = [](double t) { return std::exp(0.05 * t) + 0.5 * t - 1.0; };
  const auto kp = estimate_keys(from_key(KeyKind::IG, p, lambda), KeyKind::IG, p);
  REQUIRE(kp.ages.size() == 91);
  CHECK(rel(kp.key_at_s, lambda(20)) < 1e-8);
  for (std::size_t i = 0; i < kp.ages.size(); ++i) {
    if (!kp.capped_ages.empty() && kp.ages[i] >= kp.capped_ages.front()) continue;
    CHECK(rel(kp.values[i], lambda(kp.ages[i])) < 1e-7);
  }
  CHECK(kp.monotonicity_flags.empty());
}

TEST_CASE("ID linear key is recovered beyond the anchor") {
  const SemParams p;
  // M(S) = 0 is outside the ID domain, so the anchor is the boundary clamp.
  auto key = [&](double t) { return t > p.cond_age ? -5.0 * (t - p.cond_age) : id_boundary_key(p); };
  const auto cm = from_key(KeyKind::ID, p, key);
  const auto kp = estimate_keys(cm, KeyKind::ID, p);
  CHECK(kp.key_at_s == id_boundary_key(p));
  int checked = 0;
  for (std::size_t i = 0; i < kp.ages.size(); ++i) {
    // Young ages have q below the double range (see the anchor test).
    if (kp.ages[i] <= p.cond_age || cm.q(kp.ages[i]) < std::numeric_limits<double>::min()) continue;
    ++checked;
    CHECK(rel(kp.values[i], key(kp.ages[i])) < 1e-7);
  }
  CHECK(checked >= 70);
}

TEST_CASE("round trip q -> key -> q over random curves") {
  const SemParams p;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ua(0.03, 0.09), ub(0.2, 2.0), ud(-40.0, -2.0);
  for (int rep = 0; rep < 10; ++rep) {
    const double a = ua(rng), b = ub(rng), d = ud(rng);
    for (KeyKind kind : {KeyKind::IG, KeyKind::ID}) {
      auto key = [&](double t) {
        if (kind == KeyKind::IG) return std::exp(a * t) + b * t - 1.0;
        return t < 20.0 ? -500.0 * (t + 1.0) / 21.0 : -500.0 + d * (t - 20.0);
      };
      const auto cm = from_key(kind, p, key);
      const auto cond = conditional_data(cm, p.cond_age);
      const auto kp = estimate_keys(cm, kind, p);
      const double qs = q_key(kind, kp.key_at_s, p);
      for (std::size_t i = 0; i < kp.ages.size(); ++i) {
        const double c = cond[static_cast<std::size_t>(kp.ages[i] - p.cond_age)];
        if (c >= kCondCap) continue;
        CHECK(std::fabs(conditional(q_key(kind, kp.values[i], p), qs) - c) < 1e-10);
      }
    }
  }
}

TEST_CASE("cond = 1 is capped and flagged") {
  const SemParams p;
  std::vector<int> ages{20, 21, 22};
  std::vector<double> cond{0.0, 0.5, 1.0};
  const auto kp = invert_pointwise(ages, cond, 10.0, KeyKind::IG, p);
  REQUIRE(kp.capped_ages.size() == 1);
  CHECK(kp.capped_ages[0] == 22);
  CHECK(std::isfinite(kp.values[2]));
  CHECK(conditional(q_ig(kp.values[2], p), q_ig(10.0, p)) >= kCondCap - 1e-13);
}

TEST_CASE("non-monotone data is rejected with the offending ages") {
  const SemParams p;
  std::vector<int> ages{20, 21, 22};
  std::vector<double> cond{0.0, 0.5, 0.4};
  try {
    invert_pointwise(ages, cond, 10.0, KeyKind::IG, p);
    FAIL("expected monotonicity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::monotonicity);
    CHECK(std::string(e.what()).find("22") != std::string::npos);
  }
}

TEST_CASE("gaps are skipped") {
  const SemParams p;
  std::vector<int> ages{20, 21, 22, 23};
  std::vector<double> cond{0.0, 0.1, std::nan(""), 0.3};
  const auto kp = invert_pointwise(ages, cond, 5.0, KeyKind::IG, p);
  CHECK(kp.ages == std::vector<int>{20, 21, 23});
}

TEST_CASE("IG inversion of any nondecreasing vector is nondecreasing") {
  const SemParams p;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 0.05);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<int> ages;
    std::vector<double> cond;
    double c = 0.0;
    for (int t = 20; t <= 110; ++t) {
      ages.push_back(t);
      cond.push_back(std::min(c, 1.0));
      c += u(rng);
    }
    const auto kp = invert_pointwise(ages, cond, 300.0, KeyKind::IG, p);
    for (std::size_t i = 1; i < kp.values.size(); ++i) CHECK(kp.values[i] >= kp.values[i - 1] - 1e-9);
    CHECK(kp.monotonicity_flags.empty());
  }
}

TEST_CASE("inadmissible anchors are rejected") {
  const SemParams p;
  std::vector<int> ages{20};
  std::vector<double> cond{0.0};
  CHECK_THROWS_AS(invert_pointwise(ages, cond, 1.0, KeyKind::ID, p), Error);
  CHECK_THROWS_AS(invert_pointwise(ages, cond, -1.0, KeyKind::IG, p), Error);
}
