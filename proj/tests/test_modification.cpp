#include <cmath>

#include "doctest.h"
#include "sem/error.hpp"
#include "sem/modification.hpp"

using namespace sem;

namespace {

double legendre_mode(int k, double t) {
  const double u = 2.0 * (t - 20.0) / 90.0 - 1.0;
  const double pk = k == 1 ? u : k == 2 ? 0.5 * (3 * u * u - 1) : 0.5 * (5 * u * u * u - 3 * u);
  return std::sqrt((2 * k + 1) / 90.0) * pk;
}

Eigen::VectorXd project(const BsplineBasis& b, auto f) {
  std::vector<double> ts, ys;
  for (double t = 20.0; t <= 110.0; t += 0.5) {
    ts.push_back(t);
    ys.push_back(f(t));
  }
  return fit_coeffs(ts, ys, b).coeffs;
}

// IG model with mean e^{0.06 t} + slope t - 1 and k Legendre eigenfunctions.
FpcaModel ig_model(int k, double slope = 1.0) {
  const auto b = make_basis(20, 110, 20, 4);
  Eigen::MatrixXd eig(20, k);
  for (int j = 0; j < k; ++j) eig.col(j) = project(b, [j](double t) { return legendre_mode(j + 1, t); });
  Eigen::VectorXd ev(k);
  for (int j = 0; j < k; ++j) ev[j] = 1e5 / (j + 1);
  return FpcaModel{KeyKind::IG,
                   b,
                   {1781, 1782},
                   project(b, [slope](double t) { return std::exp(0.06 * t) + slope * t - 1.0; }),
                   eig,
                   ev,
                   Eigen::MatrixXd::Zero(2, k),
                   Eigen::VectorXd::Ones(k),
                   k,
                   0.995,
                   false};
}

PartialData partial_from(const FpcaModel& model, const std::vector<double>& z, const SemParams& p, int last_age) {
  PartialData d;
  for (int t = p.cond_age; t <= last_age; ++t) d.ages.push_back(t);
  const auto m = predicted_mortality(model, z, p, d.ages, p.cond_age);
  d.cond = m.q;
  return d;
}

ScoreForecast flat_forecast(int component, double point, double half, int h) {
  ScoreForecast f;
  f.component = component;
  f.horizon = h;
  f.points.assign(static_cast<std::size_t>(h), point);
  f.variances.assign(static_cast<std::size_t>(h), 1.0);
  f.intervals.push_back({0.95, std::vector<double>(static_cast<std::size_t>(h), point - half),
                         std::vector<double>(static_cast<std::size_t>(h), point + half)});
  return f;
}

}  // namespace

TEST_CASE("data generated at the point forecast leave it unchanged") {
  const SemParams p;
  const auto model = ig_model(3);
  const ScoreBox box{{100.0, -50.0, 20.0}, {-400.0, -550.0, -480.0}, {600.0, 450.0, 520.0}};
  const auto data = partial_from(model, box.point, p, 80);
  const auto mk = modify_scores_in_box(box, model, data, p);
  CHECK(mk.objective_at_point < 1e-28);
  CHECK(mk.objective <= mk.objective_at_point);
  for (int j = 0; j < 3; ++j) CHECK(std::fabs(mk.scores_tilde[static_cast<std::size_t>(j)] - box.point[static_cast<std::size_t>(j)]) < 1e-6);
}

TEST_CASE("an optimum planted at a box corner is found") {
  const SemParams p;
  // Steep mean so every point of the box keeps the key increasing.
  const auto model = ig_model(3, 8.0);
  const ScoreBox box{{0.0, 0.0, 0.0}, {-80.0, -80.0, -80.0}, {80.0, 80.0, 80.0}};
  for (const auto& corner : {std::vector<double>{80.0, -80.0, 80.0}, std::vector<double>{-80.0, -80.0, -80.0},
                             std::vector<double>{80.0, 80.0, -80.0}, std::vector<double>{-80.0, 80.0, 80.0}}) {
    const auto data = partial_from(model, corner, p, 95);
    const auto mk = modify_scores_in_box(box, model, data, p);
    for (int j = 0; j < 3; ++j)
      CHECK(std::fabs(mk.scores_tilde[static_cast<std::size_t>(j)] - corner[static_cast<std::size_t>(j)]) <= 1e-4 * 160.0);
    CHECK(mk.objective <= mk.objective_at_point);
  }
}

TEST_CASE("an exact corner optimum is found") {
  const SemParams p;
  const auto model = ig_model(2);
  const ScoreBox box{{0.0, 0.0}, {-300.0, -300.0}, {300.0, 300.0}};
  const std::vector<double> corner{300.0, -300.0};
  const auto data = partial_from(model, corner, p, 90);
  const auto mk = modify_scores_in_box(box, model, data, p);
  for (int j = 0; j < 2; ++j)
    CHECK(std::fabs(mk.scores_tilde[static_cast<std::size_t>(j)] - corner[static_cast<std::size_t>(j)]) <= 1e-4 * 600.0);
}

TEST_CASE("zero-width components stay at the point forecast") {
  const SemParams p;
  const auto model = ig_model(2);
  const ScoreBox box{{40.0, 10.0}, {40.0, -200.0}, {40.0, 200.0}};
  const auto data = partial_from(model, {300.0, 100.0}, p, 90);
  const auto mk = modify_scores_in_box(box, model, data, p);
  CHECK(mk.scores_tilde[0] == 40.0);
  CHECK(mk.scores_tilde[1] >= -200.0);
  CHECK(mk.scores_tilde[1] <= 200.0);
}

TEST_CASE("modified scores stay in the box and never worsen the fit") {
  const SemParams p;
  const auto model = ig_model(3);
  const ScoreBox box{{10.0, 20.0, -30.0}, {-100.0, -80.0, -130.0}, {120.0, 120.0, 70.0}};
  for (const auto& truth : {std::vector<double>{900.0, -700.0, 30.0}, std::vector<double>{-40.0, 60.0, 0.0}}) {
    const auto data = partial_from(model, truth, p, 70);
    const auto mk = modify_scores_in_box(box, model, data, p);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(mk.scores_tilde[j] >= box.lower[j]);
      CHECK(mk.scores_tilde[j] <= box.upper[j]);
    }
    CHECK(mk.objective <= mk.objective_at_point);
    CHECK(std::fabs(mk.objective - modification_objective(model, mk.scores_tilde, data.ages, data.cond, p)) < 1e-15);
  }
}

TEST_CASE("applicability range and empty data") {
  const SemParams p;
  const auto model = ig_model(2);
  const std::vector<ScoreForecast> fc{flat_forecast(0, 0.0, 100.0, 90), flat_forecast(1, 0.0, 100.0, 90)};
  const auto data = partial_from(model, {50.0, 50.0}, p, 110);
  try {
    modify_scores(fc, model, 1830, 1830, data, p, 0.95);
    FAIL("expected not_applicable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_applicable);
  }
  CHECK_THROWS_AS(modify_scores(fc, model, 1921, 1830, data, p, 0.95), Error);
  // Cohort 1920 is the last one with data beyond S (age 20 only): no ages > S.
  CHECK_THROWS_AS(modify_scores(fc, model, 1920, 1830, data, p, 0.95), Error);
  const auto mk = modify_scores(fc, model, 1870, 1830, data, p, 0.95);
  CHECK(mk.fit_ages.front() == 20);
  CHECK(mk.fit_ages.back() == 70);
  CHECK(mk.box.lower[0] == -100.0);
  CHECK_THROWS_AS(modify_scores(fc, model, 1870, 1830, PartialData{}, p, 0.95), Error);
}

TEST_CASE("predicted mortality") {
  const SemParams p;
  auto model = ig_model(2);
  std::vector<int> ages;
  for (int t = 21; t <= 110; ++t) ages.push_back(t);
  const std::vector<double> zero{0.0, 0.0};

  SUBCASE("constant key gives zero conditional mortality") {
    model.mean_coeffs = Eigen::VectorXd::Constant(20, 250.0);
    const auto m = predicted_mortality(model, zero, p, ages, p.cond_age);
    for (double q : m.q) CHECK(std::fabs(q) < 1e-15);
  }
  SUBCASE("composition with the reconstructed key") {
    const std::vector<double> z{40.0, -30.0};
    const auto m = predicted_mortality(model, z, p, ages, p.cond_age);
    REQUIRE(m.clamped_ages.empty());
    const double qs = q_ig(reconstruct(model, z, 20.0), p);
    for (std::size_t i = 0; i < ages.size(); ++i) {
      const double ref = (q_ig(reconstruct(model, z, ages[i]), p) - qs) / (1.0 - qs);
      CHECK(std::fabs(m.q[i] - ref) < 1e-12);
    }
    for (std::size_t i = 1; i < m.q.size(); ++i) CHECK(m.q[i] >= m.q[i - 1]);
    CHECK_FALSE(m.non_monotone);
  }
  SUBCASE("zero scores give the mean curve") {
    const auto m = predicted_mortality(model, zero, p, ages, p.cond_age);
    const double qs = q_ig(model.basis.eval(model.mean_coeffs, 20.0), p);
    for (std::size_t i = 0; i < ages.size(); ++i)
      CHECK(std::fabs(m.q[i] - conditional(q_ig(model.basis.eval(model.mean_coeffs, ages[i]), p), qs)) < 1e-15);
  }
  SUBCASE("inadmissible keys are clamped and flagged") {
    const std::vector<double> z{-4000.0, 0.0};
    const auto m = predicted_mortality(model, z, p, ages, p.cond_age);
    CHECK_FALSE(m.clamped_ages.empty());
    for (double q : m.q) {
      CHECK(q >= 0.0);
      CHECK(q <= 1.0);
    }
  }
}
