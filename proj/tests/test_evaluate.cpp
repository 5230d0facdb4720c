#include <cmath>
#include <random>

#include "doctest.h"
#include "sem/error.hpp"
#include "sem/evaluate.hpp"

using namespace sem;

TEST_CASE("mse arithmetic") {
  std::vector<double> data(71), pred(71);
  for (int i = 0; i < 71; ++i) data[static_cast<std::size_t>(i)] = 0.01 * i / 71.0;
  CHECK(mse(data, data, 40, 110) == 0.0);
  for (int i = 0; i < 71; ++i) pred[static_cast<std::size_t>(i)] = data[static_cast<std::size_t>(i)] + 0.01;
  CHECK(mse(pred, data, 40, 110) == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK_THROWS_AS(mse(std::span<const double>(pred).first(70), data, 40, 110), Error);
  CHECK_THROWS_AS(mse(pred, data, 41, 110), Error);
}

TEST_CASE("mse is symmetric and vanishes only on equal curves") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> a(21), b(21);
    for (std::size_t i = 0; i < 21; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
    }
    CHECK(mse(a, b, 90, 110) == mse(b, a, 90, 110));
    CHECK(mse(a, b, 90, 110) > 0.0);
    CHECK(mse(a, b, 90, 110) >= 0.0);
  }
}

TEST_CASE("single report table") {
  const std::vector<MseReport> r{{KeyKind::IG, 1870, "unmodified", 7.3466e-6, 70, 110, 41}};
  const auto t = render_table(r);
  CHECK(t.text.find("1870") != std::string::npos);
  CHECK(t.text.find("7.3466E-06") != std::string::npos);
  CHECK(t.tsv == "cohort\tIG/unmodified\n1870\t7.3466e-06\n");
}

TEST_CASE("columns are ordered ID before IG and unmodified before modified") {
  const std::vector<MseReport> r{{KeyKind::IG, 1890, modified_variant(0.95), 3e-6, 50, 110, 61},
                                 {KeyKind::IG, 1870, "unmodified", 1e-6, 70, 110, 41},
                                 {KeyKind::ID, 1870, modified_variant(0.95), 2e-6, 70, 110, 41},
                                 {KeyKind::ID, 1870, "unmodified", 4e-6, 70, 110, 41}};
  const auto t = render_table(r);
  const auto header = t.tsv.substr(0, t.tsv.find('\n'));
  CHECK(header == "cohort\tID/unmodified\tID/modified(0.95)\tIG/unmodified\tIG/modified(0.95)");
  CHECK(t.tsv.find("1890\tNA\tNA\tNA\t3e-06") != std::string::npos);
  CHECK(t.text.find("note:") == std::string::npos);
}

TEST_CASE("missing variants are omitted and noted") {
  const std::vector<MseReport> r{{KeyKind::IG, 1870, "unmodified", 1e-6, 70, 110, 41}};
  const auto t = render_table(r);
  CHECK(t.text.find("note: no reports for ID/unmodified ID/modified IG/modified") != std::string::npos);
  CHECK(t.tsv.find("modified(") == std::string::npos);
}
