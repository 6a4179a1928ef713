#pragma once

#include <span>
#include <vector>

#include "driftforge/spectral.hpp"

namespace driftforge {

// Upper bound on sup_{[a,b]} S^2 over the class, by Lipschitz chaining from
// |S(N)| <= L: |S(x)| <= L (1 + |x - N|) <= L (1 + N + max(|a|, |b|)).
double class_sup_bound(double L, double N, double a, double b);

// c(d) = (d-1) sigma_*^2 L (b-a)^(1/2) / (n (s_* + sqrt(d sigma_* / n)))
double shrink_coefficient(int d, double sigma_star, double L, double a, double b, int n,
                          double s_star);

struct ShrinkageConfig {
  int d = 1;
  double sigma_star = 1.0;
  double s_star = 1.0;
  double L = 2.0;
  double a = 0.0;
  double b = 1.0;
  int n = 2;
  double c = 0.0;

  // Fills c from the other fields.
  static ShrinkageConfig make(int d, double sigma_star, double s_star, double L, double a,
                              double b, int n);
};

// theta*_j = (1 - c/||theta_hat_{1..d}||) theta_hat_j for j <= d, theta_hat_j
// beyond. A zero leading block is returned unshrunk.
std::vector<double> shrink(std::span<const double> theta_hat, int d, double c);

// S*_lambda on the grid: the weighted fit applied to the shrunk coefficients.
PiecewiseEstimate improved_fit(const WeightVector& lambda, std::span<const double> theta_star,
                               const BasisMatrix& basis, bool gamma);

}  // namespace driftforge
