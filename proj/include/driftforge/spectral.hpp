#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "driftforge/design.hpp"

namespace driftforge {

// Rows phi_j evaluated on the grid, orthonormal for the empirical inner
// product (f, g)_n = ((b - a)/n) sum_l f(x_l) g(x_l).
class BasisMatrix {
 public:
  BasisMatrix(GridSpec grid, std::vector<double> phi);

  int n() const { return grid_.n; }
  const GridSpec& grid() const { return grid_; }
  // j, l are 0-based: row j is phi_{j+1}, column l is x_{l+1}.
  double operator()(std::size_t j, std::size_t l) const { return phi_[j * grid_.n + l]; }
  std::span<const double> row(std::size_t j) const {
    return {phi_.data() + j * grid_.n, static_cast<std::size_t>(grid_.n)};
  }
  // max_{i,j} |(phi_i, phi_j)_n - 1{i=j}|
  double gram_deviation() const;

 private:
  GridSpec grid_;
  std::vector<double> phi_;  // row-major n x n
};

// Discrete trigonometric system: constant, then cos/sin pairs of increasing
// frequency; for even n the last row is the alternating sequence (-1)^l.
BasisMatrix build_basis(const GridSpec& grid);

struct WeightVector {
  std::vector<double> lambda;
  int d = 1;

  // 1 on the first d coordinates, 0 beyond.
  static WeightVector leading(int n, int d);
  static WeightVector ones(int n);
  // Throws ArgumentError unless lambda in [0,1]^n with the first d entries 1.
  void validate() const;
  // Number of coordinates with nonzero weight.
  int effective_dimension() const;
};

struct SpectralData {
  std::vector<double> theta_hat;
  std::vector<double> s;
  bool gamma = false;
};

// theta_hat_j = ((b - a)/n) sum_l Y_l phi_j(x_l)
std::vector<double> fourier_coefficients(std::span<const double> Y, const BasisMatrix& basis);

// s_j = ((b - a)/n) sum_l sigma_l^2 phi_j(x_l)^2
std::vector<double> variance_proxies(std::span<const double> sigma_sq, const BasisMatrix& basis);

// Piecewise-constant extension of grid values: values[0] on [a, x_1],
// values[l] on (x_l, x_{l+1}].
struct PiecewiseEstimate {
  GridSpec grid;
  std::vector<double> values;

  std::size_t cell(double x) const;
  double operator()(double x) const { return values[cell(x)]; }
};

// values_l = sum_j lambda_j theta_j phi_j(x_l) 1_Gamma
PiecewiseEstimate wls_fit(const WeightVector& lambda, std::span<const double> theta,
                          const BasisMatrix& basis, bool gamma);

// ((b - a)/n) sum values^2
double empirical_norm_sq(std::span<const double> values, const GridSpec& grid);

void write_basis_csv(std::ostream& out, const BasisMatrix& basis);
void write_coefficients_csv(std::ostream& out, const SpectralData& spectral);

}  // namespace driftforge
