#include <doctest.h>

#include <cmath>

#include "driftforge/errors.hpp"
#include "driftforge/shrinkage.hpp"

using namespace driftforge;

TEST_CASE("class sup bound by Lipschitz chaining") {
  CHECK(class_sup_bound(2.0, 3.0, -1.0, 1.0) == doctest::Approx(100.0));
  CHECK(class_sup_bound(1.0, 1.0, 0.0, 0.5) == doctest::Approx(6.25));
}

TEST_CASE("shrink coefficient") {
  // 9 * 2^2 * 1 * 1 / (100 (4 + sqrt(10 * 2 / 100)))
  const double expected = 36.0 / (100.0 * (4.0 + std::sqrt(0.2)));
  const double c = shrink_coefficient(10, 2.0, 1.0, 0.0, 1.0, 100, 4.0);
  CHECK(c == doctest::Approx(expected).epsilon(1e-14));
  CHECK(c == doctest::Approx(0.08095).epsilon(1e-4));

  CHECK(shrink_coefficient(1, 2.0, 1.0, 0.0, 1.0, 100, 4.0) == 0.0);

  double prev = c;
  for (int n : {200, 400, 1000, 10000}) {
    const double cn = shrink_coefficient(10, 2.0, 1.0, 0.0, 1.0, n, 4.0);
    CHECK(cn < prev);
    prev = cn;
  }

  const auto cfg = ShrinkageConfig::make(10, 2.0, 4.0, 1.0, 0.0, 1.0, 100);
  CHECK(cfg.c == c);
}

TEST_CASE("James-Stein shrink of the leading block") {
  const std::vector<double> th{3.0, 4.0, 7.0};
  const auto s = shrink(th, 2, 1.0);
  CHECK(s[0] == doctest::Approx(2.4));
  CHECK(s[1] == doctest::Approx(3.2));
  CHECK(s[2] == 7.0);

  CHECK(shrink(th, 2, 0.0) == th);
  const std::vector<double> z(3, 0.0);
  CHECK(shrink(z, 2, 1.0) == z);
}

TEST_CASE("improved fit reduces to the weighted fit when c = 0") {
  const auto g = build_grid(0.0, 1.0, 6);
  const auto B = build_basis(g);
  const std::vector<double> th{0.3, -1.0, 2.0, 0.5, 0.0, 0.1};
  const auto lam = WeightVector::leading(6, 3);
  const auto a = wls_fit(lam, th, B, true);
  const auto b = improved_fit(lam, shrink(th, 3, 0.0), B, true);
  CHECK(a.values == b.values);
  for (double v : improved_fit(lam, th, B, false).values) CHECK(v == 0.0);
}
