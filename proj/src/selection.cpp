#include "driftforge/selection.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "driftforge/csv.hpp"
#include "driftforge/errors.hpp"

namespace driftforge {

WeightFamily weight_family(int n, int d, int beta_max, int t_max) {
  if (d < 1 || d > n) throw ArgumentError("weight_family: need 1 <= d <= n");
  if (beta_max < 1 || t_max < 1) throw ArgumentError("weight_family: beta_max, t_max must be >= 1");

  WeightFamily fam;
  fam.d = d;
  fam.n = n;
  for (int beta = 1; beta <= beta_max; ++beta) {
    const double rate = std::pow(static_cast<double>(n), 1.0 / (2.0 * beta + 1.0));
    for (int t = 1; t <= t_max; ++t) {
      const double omega = d + t * rate;
      WeightVector w;
      w.d = d;
      w.lambda.resize(static_cast<std::size_t>(n));
      for (int j = 1; j <= n; ++j) {
        w.lambda[j - 1] = j <= d ? 1.0 : std::max(0.0, 1.0 - std::pow(j / omega, beta));
      }
      const bool duplicate = std::any_of(fam.members.begin(), fam.members.end(),
                                         [&](const WeightVector& m) { return m.lambda == w.lambda; });
      if (duplicate) continue;
      fam.members.push_back(std::move(w));
      fam.index.push_back({beta, t});
    }
  }
  return fam;
}

int default_block_size(int n) {
  return std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(n)))));
}

std::vector<double> theta_tilde(std::span<const double> theta_hat,
                                std::span<const double> theta_star, std::span<const double> s,
                                int n, double a, double b) {
  if (theta_hat.size() != theta_star.size() || theta_hat.size() != s.size()) {
    throw ArgumentError("theta_tilde: length mismatch");
  }
  const double cell = (b - a) / n;
  std::vector<double> out(theta_hat.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = theta_hat[j] * theta_star[j] - cell * s[j];
  return out;
}

double penalty(const WeightVector& lambda, std::span<const double> s, int n, double a, double b) {
  if (lambda.lambda.size() != s.size()) throw ArgumentError("penalty: length mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) acc += lambda.lambda[j] * lambda.lambda[j] * s[j];
  return (b - a) / n * acc;
}

void check_rho(double rho, bool allow_exploratory) {
  if (allow_exploratory) return;
  if (!(rho > 0.0 && rho < 1.0 / 6.0)) {
    throw ArgumentError("rho must lie in (0, 1/6); set the exploratory override to go outside");
  }
}

double cost(const WeightVector& lambda, std::span<const double> theta_star,
            std::span<const double> theta_tilde, std::span<const double> s, double rho, int n,
            double a, double b, bool allow_exploratory_rho) {
  check_rho(rho, allow_exploratory_rho);
  const std::size_t m = lambda.lambda.size();
  if (theta_star.size() != m || theta_tilde.size() != m || s.size() != m) {
    throw ArgumentError("cost: length mismatch");
  }
  double fit = 0.0;
  double cross = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double l = lambda.lambda[j];
    fit += l * l * theta_star[j] * theta_star[j];
    cross += l * theta_tilde[j];
  }
  return fit - 2.0 * cross + rho * penalty(lambda, s, n, a, b);
}

SelectionResult select(const WeightFamily& family, const SpectralData& spectral,
                       std::span<const double> theta_star, double rho, double a, double b,
                       bool allow_exploratory_rho) {
  if (family.members.empty()) throw ArgumentError("select: empty weight family");
  check_rho(rho, allow_exploratory_rho);
  const int n = family.n;
  const auto tt = theta_tilde(spectral.theta_hat, theta_star, spectral.s, n, a, b);

  SelectionResult res;
  res.rho = rho;
  res.rho_exploratory = !(rho > 0.0 && rho < 1.0 / 6.0);
  res.cost_values.reserve(family.size());
  for (const auto& member : family.members) {
    res.cost_values.push_back(cost(member, theta_star, tt, spectral.s, rho, n, a, b, true));
  }
  // min_element keeps the first of equal values.
  const auto best = std::min_element(res.cost_values.begin(), res.cost_values.end());
  res.alpha_hat = static_cast<std::size_t>(best - res.cost_values.begin());
  res.alpha = family.index[res.alpha_hat];
  res.lambda_hat = family.members[res.alpha_hat];
  return res;
}

SpectralData spectral_data(const SequentialObservations& obs, const BasisMatrix& basis) {
  return {fourier_coefficients(obs.Y, basis), variance_proxies(obs.sigma_sq, basis), obs.gamma};
}

AdaptiveResult adaptive_estimate(const SequentialObservations& observations,
                                 const BasisMatrix& basis, const ShrinkageConfig& cfg,
                                 const WeightFamily& family, double rho,
                                 bool allow_exploratory_rho) {
  if (family.n != basis.n() || family.d != cfg.d) {
    throw ArgumentError("adaptive_estimate: family does not match basis or block size");
  }
  AdaptiveResult res;
  res.spectral = spectral_data(observations, basis);
  res.theta_star = shrink(res.spectral.theta_hat, cfg.d, cfg.c);
  const GridSpec& g = basis.grid();
  res.selection = select(family, res.spectral, res.theta_star, rho, g.a, g.b, allow_exploratory_rho);
  res.estimate = improved_fit(res.selection.lambda_hat, res.theta_star, basis, observations.gamma);
  return res;
}

void write_selection_csv(std::ostream& out, const WeightFamily& family,
                         const SelectionResult& result) {
  out << "alpha_beta,alpha_t,J_n,selected\n";
  for (std::size_t i = 0; i < family.size(); ++i) {
    out << family.index[i].beta << ',' << family.index[i].t << ','
        << csv::real(result.cost_values[i]) << ',' << (i == result.alpha_hat ? 1 : 0) << '\n';
  }
}

}  // namespace driftforge
