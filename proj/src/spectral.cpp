#include "driftforge/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "driftforge/csv.hpp"
#include "driftforge/errors.hpp"

namespace driftforge {

namespace {

constexpr double kGramTolerance = 1e-10;

double inner(std::span<const double> f, std::span<const double> g, double cell) {
  double acc = 0.0;
  for (std::size_t l = 0; l < f.size(); ++l) acc += f[l] * g[l];
  return cell * acc;
}

// Two passes of modified Gram-Schmidt under the empirical inner product.
void orthonormalize(std::vector<double>& phi, int n, double cell) {
  const auto un = static_cast<std::size_t>(n);
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < un; ++j) {
      std::span<double> rj(phi.data() + j * un, un);
      for (std::size_t i = 0; i < j; ++i) {
        std::span<const double> ri(phi.data() + i * un, un);
        const double proj = inner(rj, ri, cell);
        for (std::size_t l = 0; l < un; ++l) rj[l] -= proj * ri[l];
      }
      const double norm = std::sqrt(inner(rj, rj, cell));
      if (!(norm > 0.0)) throw InternalError("build_basis: rank-deficient trigonometric system");
      for (double& v : rj) v /= norm;
    }
  }
}

}  // namespace

BasisMatrix::BasisMatrix(GridSpec grid, std::vector<double> phi)
    : grid_(std::move(grid)), phi_(std::move(phi)) {
  if (phi_.size() != static_cast<std::size_t>(grid_.n) * grid_.n) {
    throw ArgumentError("BasisMatrix: matrix size does not match grid");
  }
}

double BasisMatrix::gram_deviation() const {
  const double cell = grid_.spacing();
  double worst = 0.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(n()); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double target = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(inner(row(i), row(j), cell) - target));
    }
  }
  return worst;
}

BasisMatrix build_basis(const GridSpec& grid) {
  const int n = grid.n;
  if (n < 2) throw ArgumentError("build_basis: need n >= 2");
  const auto un = static_cast<std::size_t>(n);
  const double len = grid.length();
  std::vector<double> phi(un * un);

  for (std::size_t l = 0; l < un; ++l) phi[l] = 1.0 / std::sqrt(len);
  for (int j = 2; j <= n; ++j) {
    double* r = phi.data() + static_cast<std::size_t>(j - 1) * un;
    const int freq = j / 2;  // ceil((j-1)/2)
    const bool cosine = j % 2 == 0;
    if (cosine && 2 * freq == n) {
      // Nyquist row: cos(pi l) = (-1)^l carries norm 1 with weight 1/sqrt(b-a).
      for (int l = 1; l <= n; ++l) r[l - 1] = (l % 2 == 0 ? 1.0 : -1.0) / std::sqrt(len);
      continue;
    }
    const double amp = std::sqrt(2.0 / len);
    for (int l = 1; l <= n; ++l) {
      // (x_l - a)/(b - a) = l/n exactly; reduce the angle in integers.
      const long m = (static_cast<long>(freq) * l) % n;
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / n;
      r[l - 1] = amp * (cosine ? std::cos(angle) : std::sin(angle));
    }
  }

  BasisMatrix basis(grid, phi);
  if (basis.gram_deviation() > kGramTolerance) {
    orthonormalize(phi, n, grid.spacing());
    basis = BasisMatrix(grid, std::move(phi));
    if (basis.gram_deviation() > kGramTolerance) {
      throw InternalError("build_basis: Gram matrix deviates from identity");
    }
  }
  return basis;
}

WeightVector WeightVector::leading(int n, int d) {
  if (d < 1 || d > n) throw ArgumentError("WeightVector::leading: need 1 <= d <= n");
  WeightVector w;
  w.d = d;
  w.lambda.assign(static_cast<std::size_t>(n), 0.0);
  std::fill_n(w.lambda.begin(), d, 1.0);
  return w;
}

WeightVector WeightVector::ones(int n) {
  WeightVector w;
  w.d = n;
  w.lambda.assign(static_cast<std::size_t>(n), 1.0);
  return w;
}

void WeightVector::validate() const {
  if (d < 1 || static_cast<std::size_t>(d) > lambda.size()) {
    throw ArgumentError("WeightVector: need 1 <= d <= n");
  }
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    if (!(lambda[j] >= 0.0 && lambda[j] <= 1.0)) {
      throw ArgumentError("WeightVector: weights must lie in [0, 1]");
    }
    if (j < static_cast<std::size_t>(d) && lambda[j] != 1.0) {
      throw ArgumentError("WeightVector: first d weights must equal 1");
    }
  }
}

int WeightVector::effective_dimension() const {
  return static_cast<int>(std::count_if(lambda.begin(), lambda.end(), [](double v) { return v != 0.0; }));
}

std::vector<double> fourier_coefficients(std::span<const double> Y, const BasisMatrix& basis) {
  if (Y.size() != static_cast<std::size_t>(basis.n())) {
    throw ArgumentError("fourier_coefficients: length mismatch");
  }
  const double cell = basis.grid().spacing();
  std::vector<double> theta(Y.size());
  for (std::size_t j = 0; j < theta.size(); ++j) theta[j] = inner(Y, basis.row(j), cell);
  return theta;
}

std::vector<double> variance_proxies(std::span<const double> sigma_sq, const BasisMatrix& basis) {
  if (sigma_sq.size() != static_cast<std::size_t>(basis.n())) {
    throw ArgumentError("variance_proxies: length mismatch");
  }
  const double cell = basis.grid().spacing();
  std::vector<double> s(sigma_sq.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    const auto r = basis.row(j);
    double acc = 0.0;
    for (std::size_t l = 0; l < r.size(); ++l) acc += sigma_sq[l] * r[l] * r[l];
    s[j] = cell * acc;
  }
  return s;
}

std::size_t PiecewiseEstimate::cell(double x) const {
  if (!(x >= grid.a && x <= grid.b)) throw ArgumentError("PiecewiseEstimate: x outside [a, b]");
  // First grid point >= x; [a, x_1] maps to 0.
  const auto it = std::lower_bound(grid.points.begin(), grid.points.end(), x);
  if (it == grid.points.end()) return values.size() - 1;
  return static_cast<std::size_t>(it - grid.points.begin());
}

PiecewiseEstimate wls_fit(const WeightVector& lambda, std::span<const double> theta,
                          const BasisMatrix& basis, bool gamma) {
  const auto n = static_cast<std::size_t>(basis.n());
  if (theta.size() != n || lambda.lambda.size() != n) {
    throw ArgumentError("wls_fit: length mismatch");
  }
  PiecewiseEstimate est{basis.grid(), std::vector<double>(n, 0.0)};
  if (!gamma) return est;
  for (std::size_t j = 0; j < n; ++j) {
    const double coef = lambda.lambda[j] * theta[j];
    if (coef == 0.0) continue;
    const auto r = basis.row(j);
    for (std::size_t l = 0; l < n; ++l) est.values[l] += coef * r[l];
  }
  return est;
}

double empirical_norm_sq(std::span<const double> values, const GridSpec& grid) {
  if (values.size() != static_cast<std::size_t>(grid.n)) {
    throw ArgumentError("empirical_norm_sq: length mismatch");
  }
  return inner(values, values, grid.spacing());
}

void write_basis_csv(std::ostream& out, const BasisMatrix& basis) {
  const auto n = static_cast<std::size_t>(basis.n());
  out << "j";
  for (std::size_t l = 0; l < n; ++l) out << ",x_" << (l + 1);
  out << '\n';
  for (std::size_t j = 0; j < n; ++j) {
    out << (j + 1);
    for (std::size_t l = 0; l < n; ++l) out << ',' << csv::real(basis(j, l));
    out << '\n';
  }
}

void write_coefficients_csv(std::ostream& out, const SpectralData& spectral) {
  out << "j,theta_hat,s,gamma\n";
  for (std::size_t j = 0; j < spectral.theta_hat.size(); ++j) {
    out << (j + 1) << ',' << csv::real(spectral.theta_hat[j]) << ',' << csv::real(spectral.s[j])
        << ',' << (spectral.gamma ? 1 : 0) << '\n';
  }
}

}  // namespace driftforge
