#include "driftforge/shrinkage.hpp"

#include <algorithm>
#include <cmath>

#include "driftforge/errors.hpp"

namespace driftforge {

double class_sup_bound(double L, double N, double a, double b) {
  const double r = L * (1.0 + N + std::max(std::abs(a), std::abs(b)));
  return r * r;
}

double shrink_coefficient(int d, double sigma_star, double L, double a, double b, int n,
                          double s_star) {
  if (d < 1 || n < d) throw ArgumentError("shrink_coefficient: need 1 <= d <= n");
  if (!(sigma_star > 0.0) || !(s_star > 0.0)) {
    throw ArgumentError("shrink_coefficient: sigma_* and s_* must be positive");
  }
  const double num = (d - 1) * sigma_star * sigma_star * L * std::sqrt(b - a);
  const double den = n * (s_star + std::sqrt(d * sigma_star / n));
  return num / den;
}

ShrinkageConfig ShrinkageConfig::make(int d, double sigma_star, double s_star, double L, double a,
                                      double b, int n) {
  ShrinkageConfig cfg{d, sigma_star, s_star, L, a, b, n, 0.0};
  cfg.c = shrink_coefficient(d, sigma_star, L, a, b, n, s_star);
  return cfg;
}

std::vector<double> shrink(std::span<const double> theta_hat, int d, double c) {
  if (d < 1 || static_cast<std::size_t>(d) > theta_hat.size()) {
    throw ArgumentError("shrink: need 1 <= d <= n");
  }
  std::vector<double> out(theta_hat.begin(), theta_hat.end());
  double sq = 0.0;
  for (int j = 0; j < d; ++j) sq += theta_hat[j] * theta_hat[j];
  const double norm = std::sqrt(sq);
  if (norm == 0.0 || c == 0.0) return out;
  const double factor = 1.0 - c / norm;
  for (int j = 0; j < d; ++j) out[j] *= factor;
  return out;
}

PiecewiseEstimate improved_fit(const WeightVector& lambda, std::span<const double> theta_star,
                               const BasisMatrix& basis, bool gamma) {
  return wls_fit(lambda, theta_star, basis, gamma);
}

}  // namespace driftforge
