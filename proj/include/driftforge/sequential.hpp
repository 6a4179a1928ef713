#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "driftforge/design.hpp"
#include "driftforge/diffusion.hpp"

namespace driftforge {

struct DensityEstimate {
  std::vector<double> q_hat;    // raw kernel density on [0, t0)
  std::vector<double> q_tilde;  // max(q_hat, epsT)
  double epsT = 0.0;
};

// q_hat(x_k) = (1/(2 t0 h)) * sum_{t_i < t0} 1{|y_i - x_k| <= h} dt.
std::vector<double> estimate_density(const DiffusionPath& path, double t0, const GridSpec& grid);

std::vector<double> truncate_density(std::span<const double> q_hat, double epsT);

// H_k = (T - t0)(2 q_tilde_k - epsT^2) h.
std::vector<double> thresholds(std::span<const double> q_tilde, double T, double t0, double h,
                               double epsT);

// sigma_k^2 = n / ((T - t0)(q_tilde_k - epsT^2/2)(b - a)).
std::vector<double> variances(std::span<const double> q_tilde, double T, double t0, int n,
                              double a, double b, double epsT);

// Upper bound sigma_* = 4/((b - a) epsT) on every sigma_k^2.
double variance_bound(double a, double b, double epsT);

struct SequentialEstimate {
  std::vector<double> tau;       // stopping times; T + dt where not attained
  std::vector<double> s_tilde;   // (1/H_k) int Q dy, clipped at tau_k
  std::vector<char> attained;    // threshold reached by T
  std::vector<double> bias;      // B_k, only filled when the true drift is given
};

// Stopped kernel integrals over [t0, T] of the path, one per grid window.
// The last increment before crossing H_k is weighted by the fraction that
// makes the accumulated kernel mass equal H_k exactly.
SequentialEstimate sequential_estimate(const DiffusionPath& path, const GridSpec& grid, double t0,
                                       double T, std::span<const double> H,
                                       const DriftSpec* truth = nullptr);

struct SequentialObservations {
  std::vector<double> Y;
  std::vector<double> tau;
  std::vector<double> H;
  std::vector<double> sigma_sq;
  bool gamma = false;
  std::optional<std::vector<double>> B;

  DensityEstimate density;
  std::vector<double> s_tilde;
  std::vector<char> attained;
};

// Full reduction of a path to the heteroscedastic regression data on the grid.
// Pass the true drift to also record the approximation errors B_k.
SequentialObservations regression_data(const DiffusionPath& path, const GridSpec& grid,
                                       const Schedule& schedule,
                                       const DriftSpec* truth = nullptr);

// Columns k,x_k,Y_k,tau_k,H_k,sigma_sq_k,gamma.
void write_observations_csv(std::ostream& out, const SequentialObservations& obs,
                            const GridSpec& grid);

}  // namespace driftforge
