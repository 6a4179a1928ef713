#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "driftforge/sequential.hpp"
#include "driftforge/shrinkage.hpp"
#include "driftforge/spectral.hpp"

namespace driftforge {

struct WeightIndex {
  int beta = 1;
  int t = 1;
};

// Pinsker-type family: lambda(j) = 1 for j <= d and
// max(0, 1 - (j/omega)^beta) beyond, omega = d + t n^(1/(2 beta + 1)).
struct WeightFamily {
  std::vector<WeightVector> members;
  std::vector<WeightIndex> index;
  int d = 1;
  int n = 2;

  std::size_t size() const { return members.size(); }
};

WeightFamily weight_family(int n, int d, int beta_max, int t_max);

// Default shrunk block size floor(sqrt(n)).
int default_block_size(int n);

// theta~_j = theta_hat_j theta*_j - ((b - a)/n) s_j
std::vector<double> theta_tilde(std::span<const double> theta_hat,
                                std::span<const double> theta_star, std::span<const double> s,
                                int n, double a, double b);

// P_n = ((b - a)/n) sum lambda_j^2 s_j
double penalty(const WeightVector& lambda, std::span<const double> s, int n, double a, double b);

// Admissible rho is (0, 1/6); exploratory runs may opt out of the check.
void check_rho(double rho, bool allow_exploratory);

// J_n = sum lambda^2 theta*^2 - 2 sum lambda theta~ + rho P_n
double cost(const WeightVector& lambda, std::span<const double> theta_star,
            std::span<const double> theta_tilde, std::span<const double> s, double rho, int n,
            double a, double b, bool allow_exploratory_rho = false);

struct SelectionResult {
  WeightVector lambda_hat;
  std::size_t alpha_hat = 0;  // position in the family
  WeightIndex alpha;
  std::vector<double> cost_values;
  double rho = 0.1;
  bool rho_exploratory = false;  // rho outside (0, 1/6)
};

// Exhaustive argmin of J_n over the family; ties go to the lowest index.
SelectionResult select(const WeightFamily& family, const SpectralData& spectral,
                       std::span<const double> theta_star, double rho, double a, double b,
                       bool allow_exploratory_rho = false);

SpectralData spectral_data(const SequentialObservations& obs, const BasisMatrix& basis);

struct AdaptiveResult {
  PiecewiseEstimate estimate;
  SelectionResult selection;
  SpectralData spectral;
  std::vector<double> theta_star;
};

// Fourier transform, shrink, select, then the improved fit at the selected weights.
AdaptiveResult adaptive_estimate(const SequentialObservations& observations,
                                 const BasisMatrix& basis, const ShrinkageConfig& cfg,
                                 const WeightFamily& family, double rho,
                                 bool allow_exploratory_rho = false);

// Columns alpha_beta,alpha_t,J_n,selected.
void write_selection_csv(std::ostream& out, const WeightFamily& family,
                         const SelectionResult& result);

}  // namespace driftforge
