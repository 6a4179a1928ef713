#include <doctest.h>

#include <cmath>
#include <random>

#include "driftforge/errors.hpp"
#include "driftforge/spectral.hpp"

using namespace driftforge;

namespace {

// Direct long-double Gram computation, independent of BasisMatrix::gram_deviation.
double gram_error(const BasisMatrix& B) {
  const auto n = static_cast<std::size_t>(B.n());
  const long double cell = static_cast<long double>(B.grid().length()) / n;
  long double worst = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      long double acc = 0.0L;
      for (std::size_t l = 0; l < n; ++l) acc += static_cast<long double>(B(i, l)) * B(j, l);
      worst = std::max(worst, std::fabs(cell * acc - (i == j ? 1.0L : 0.0L)));
    }
  }
  return static_cast<double>(worst);
}

}  // namespace

TEST_CASE("two-point basis on [0, 1] by hand") {
  const auto B = build_basis(build_grid(0.0, 1.0, 2));
  // phi_1 = 1; phi_2 = (-1)^l at x_1 = 0.5, x_2 = 1.
  CHECK(B(0, 0) == 1.0);
  CHECK(B(0, 1) == 1.0);
  CHECK(B(1, 0) == -1.0);
  CHECK(B(1, 1) == 1.0);
  CHECK(gram_error(B) <= 1e-12);
}

TEST_CASE("basis rows are orthonormal for the example sizes") {
  for (int n : {2, 3, 5, 8, 16, 64}) {
    CAPTURE(n);
    CHECK(gram_error(build_basis(build_grid(0.0, 1.0, n))) <= 1e-10);
  }
  CHECK(gram_error(build_basis(build_grid(-0.25, 0.25, 100))) <= 1e-10);
}

TEST_CASE("Gram identity for every n in 2..512") {
  for (int n = 2; n <= 512; ++n) {
    CAPTURE(n);
    CHECK(build_basis(build_grid(-0.25, 0.25, n)).gram_deviation() <= 1e-10);
  }
}

TEST_CASE("first row is the normalized constant") {
  const auto B = build_basis(build_grid(-1.0, 3.0, 9));
  for (std::size_t l = 0; l < 9; ++l) CHECK(B(0, l) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("Fourier coefficients of constants and basis rows") {
  const auto B = build_basis(build_grid(0.0, 1.0, 12));
  const std::vector<double> c(12, 2.5);
  const auto th = fourier_coefficients(c, B);
  CHECK(th[0] == doctest::Approx(2.5).epsilon(1e-13));
  for (std::size_t j = 1; j < 12; ++j) CHECK(std::abs(th[j]) <= 1e-12);

  const auto r3 = B.row(3);
  const auto e = fourier_coefficients(std::vector<double>(r3.begin(), r3.end()), B);
  for (std::size_t j = 0; j < 12; ++j) CHECK(std::abs(e[j] - (j == 3 ? 1.0 : 0.0)) <= 1e-12);

  const auto z = fourier_coefficients(std::vector<double>(12, 0.0), B);
  for (double v : z) CHECK(v == 0.0);

  CHECK_THROWS_AS(fourier_coefficients(std::vector<double>(11, 0.0), B), ArgumentError);
}

TEST_CASE("Parseval and full reconstruction") {
  const auto g = build_grid(-0.25, 0.25, 37);
  const auto B = build_basis(g);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  std::vector<double> Y(37);
  for (double& y : Y) y = z(rng);

  const auto th = fourier_coefficients(Y, B);
  double sum_sq = 0.0;
  for (double t : th) sum_sq += t * t;
  CHECK(sum_sq == doctest::Approx(empirical_norm_sq(Y, g)).epsilon(1e-12));

  const auto fit = wls_fit(WeightVector::ones(37), th, B, true);
  for (std::size_t l = 0; l < 37; ++l) CHECK(fit.values[l] == doctest::Approx(Y[l]).epsilon(1e-10));
}

TEST_CASE("variance proxies") {
  const auto B = build_basis(build_grid(0.0, 1.0, 10));
  const auto s = variance_proxies(std::vector<double>(10, 4.559), B);
  for (double v : s) CHECK(std::abs(v - 4.559) <= 1e-10);
  for (double v : variance_proxies(std::vector<double>(10, 0.0), B)) CHECK(v == 0.0);

  // n = 2 on [0, 1]: both rows square to 1, so s_j = (sigma_1^2 + sigma_2^2)/2.
  const auto B2 = build_basis(build_grid(0.0, 1.0, 2));
  const auto s2 = variance_proxies(std::vector<double>{1.0, 2.0}, B2);
  CHECK(s2[0] == doctest::Approx(1.5));
  CHECK(s2[1] == doctest::Approx(1.5));

  CHECK_THROWS_AS(variance_proxies(std::vector<double>(3, 1.0), B), ArgumentError);
}

TEST_CASE("weighted fit") {
  const auto g = build_grid(0.0, 1.0, 8);
  const auto B = build_basis(g);
  std::vector<double> th{1.0, 0.5, -0.25, 0.0, 0.0, 0.0, 0.0, 0.0};
  const auto off = wls_fit(WeightVector::ones(8), th, B, false);
  for (double v : off.values) CHECK(v == 0.0);

  // Coefficients supported on the first 3 rows: leading(3) equals the full fit.
  const auto full = wls_fit(WeightVector::ones(8), th, B, true);
  const auto trunc = wls_fit(WeightVector::leading(8, 3), th, B, true);
  for (std::size_t l = 0; l < 8; ++l) CHECK(trunc.values[l] == doctest::Approx(full.values[l]));

  th[5] = 1.0;
  const auto cut = wls_fit(WeightVector::leading(8, 3), th, B, true);
  for (std::size_t l = 0; l < 8; ++l) CHECK(cut.values[l] == doctest::Approx(full.values[l]));

  CHECK_THROWS_AS(wls_fit(WeightVector::ones(7), th, B, true), ArgumentError);
}

TEST_CASE("weight vector validation") {
  CHECK_NOTHROW(WeightVector::leading(5, 2).validate());
  CHECK(WeightVector::leading(5, 2).effective_dimension() == 2);
  CHECK_THROWS_AS(WeightVector::leading(5, 6), ArgumentError);
  CHECK_THROWS_AS((WeightVector{{1.0, 1.5}, 1}).validate(), ArgumentError);
  CHECK_THROWS_AS((WeightVector{{0.5, 1.0}, 1}).validate(), ArgumentError);
}

TEST_CASE("piecewise extension and empirical norm") {
  const auto g = build_grid(0.0, 1.0, 4);
  const PiecewiseEstimate e{g, {1.0, 2.0, 3.0, 4.0}};
  CHECK(e(0.0) == 1.0);
  CHECK(e(0.25) == 1.0);
  CHECK(e(0.26) == 2.0);
  CHECK(e(1.0) == 4.0);
  CHECK_THROWS_AS(e(1.5), ArgumentError);
  CHECK_THROWS_AS(e(-0.1), ArgumentError);

  CHECK(empirical_norm_sq(std::vector<double>(4, 1.0), g) == doctest::Approx(1.0));
  CHECK(empirical_norm_sq(std::vector<double>(4, 0.0), g) == 0.0);
  const auto B = build_basis(g);
  const auto r0 = B.row(0);
  CHECK(empirical_norm_sq(r0, g) == doctest::Approx(1.0));
}
