#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftforge/design.hpp"
#include "driftforge/diffusion.hpp"
#include "driftforge/selection.hpp"
#include "driftforge/shrinkage.hpp"
#include "driftforge/spectral.hpp"

namespace driftforge {

struct ExperimentConfig {
  DriftSpec drift = drift_from_label("ou");
  double a = -0.25;
  double b = 0.25;
  double y0 = 0.0;
  std::vector<double> T_list{400.0};
  int reps = 2000;
  std::uint64_t base_seed = 1;
  double dt = 1e-4;
  double rho = 0.1;
  bool rho_exploratory = false;
  int d = 0;  // 0: floor(sqrt(n))
  int n = 0;  // 0: choose_n(T)
  int beta_max = 3;
  int t_max = 10;
  // Risk quadrature over [a, b]; lower/upper are forced to the interval.
  int quad_points = 20000;
  QuadratureRule quad_rule = QuadratureRule::midpoint;
  std::optional<double> t0;
  std::optional<double> epsT;
  std::optional<double> s_star;
  std::optional<double> c_override;
  int threads = 0;  // 0: hardware concurrency, capped by DRIFTFORGE_THREADS

  void validate() const;
  QuadratureSpec risk_quadrature() const;
};

// Everything about one horizon T that does not depend on the sample path.
struct Setup {
  Schedule schedule;
  GridSpec grid;
  BasisMatrix basis;
  ShrinkageConfig shrinkage;
  WeightFamily family;
  std::vector<double> truth;           // S(x_l)
  std::vector<double> truth_spectrum;  // theta_{j,n} of S
};

Setup make_setup(const ExperimentConfig& config, double T);

// Worker count: requested (or hardware concurrency when 0), capped by the
// DRIFTFORGE_THREADS environment variable and by the number of tasks.
int worker_count(int requested, int tasks);

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
};
MeanSE mean_se(std::span<const double> xs);

// int_a^b (estimate - S)^2 by the given quadrature.
double l2_risk(const PiecewiseEstimate& estimate, const DriftSpec& drift,
               const QuadratureSpec& quad);

// ||values - truth||_n^2
double empirical_risk(std::span<const double> values, std::span<const double> truth,
                      const GridSpec& grid);

enum class Estimator { wls, improved, adaptive };
const char* estimator_name(Estimator e);

struct RiskRow {
  std::string estimator;
  double T = 0.0;
  int n = 0;
  int d = 0;
  int reps_used = 0;
  int reps_failed = 0;
  MeanSE empirical;
  MeanSE integral;
  double gamma_fail_rate = 0.0;
};

struct DeltaSummary {
  double T = 0.0;
  int n = 0;
  int d = 0;
  MeanSE delta;
  double c = 0.0;
  double c_sq = 0.0;
  double sigma_star = 0.0;
  double s_star = 0.0;
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;
  MeanSE risk_wls;
  MeanSE risk_improved;
  double gamma_fail_rate = 0.0;
  int reps_used = 0;
  int reps_failed = 0;
};

struct OracleSummary {
  double T = 0.0;
  int n = 0;
  int d = 0;
  double rho = 0.0;
  double constant = 0.0;  // (1 + 6 rho)/(1 - 6 rho)
  MeanSE risk_adaptive;
  std::vector<WeightIndex> member_index;
  std::vector<MeanSE> member_risk;           // E||S_hat_lambda - S||_n^2
  std::vector<MeanSE> member_improved_risk;  // E||S*_lambda - S||_n^2
  std::vector<int> selection_counts;
  double oracle_min = 0.0;
  std::size_t oracle_argmin = 0;
  double oracle_ratio = 0.0;  // risk(S*) / oracle_min
  double residual_r_n = 0.0;  // risk(S*) - constant * oracle_min
  double gamma_fail_rate = 0.0;
  int reps_used = 0;
  int reps_failed = 0;
};

struct GammaRate {
  double T = 0.0;
  int n = 0;
  int reps_used = 0;
  int failures = 0;
  double rate = 0.0;
};

struct RiskReport {
  std::vector<RiskRow> risks;
  std::vector<DeltaSummary> deltas;
  std::vector<OracleSummary> oracles;
  std::vector<GammaRate> gamma;
  std::vector<double> truth_spectrum;  // for the last T processed
  // sigma_k^2 / sigma_* maximised over every replication; <= 1 always.
  double max_sigma_ratio = 0.0;
  int variance_bound_violations = 0;
};

// Risks of one estimator over reps seeded base_seed + i, for every T.
// lambda defaults to the leading-d indicator for wls/improved.
RiskReport mc_risk(const ExperimentConfig& config, Estimator estimator,
                   const std::optional<WeightVector>& lambda = std::nullopt);

// Paired risk difference E||S*_lambda - S||_n^2 - E||S_hat_lambda - S||_n^2.
RiskReport delta_n(const ExperimentConfig& config,
                   const std::optional<WeightVector>& lambda = std::nullopt);

// Adaptive estimator against every family member on shared seeds.
RiskReport oracle_report(const ExperimentConfig& config);

RiskReport gamma_failure_rate(const ExperimentConfig& config);

// Per-replication kernel-stage diagnostics with the true drift known.
struct KernelDiagnostics {
  double T = 0.0;
  double h = 0.0;
  std::vector<double> max_abs_bias;   // max over all k of |B_k|, per replication
  std::vector<double> std_residuals;  // sqrt(H_k)(S~_k - S(x_k) - B_k), attained k only
  double max_sigma_ratio = 0.0;
  int reps_failed = 0;
};
KernelDiagnostics kernel_diagnostics(const ExperimentConfig& config, double T);

void write_risk_csv(std::ostream& out, const RiskReport& report);
void write_delta_csv(std::ostream& out, const RiskReport& report);
void write_oracle_csv(std::ostream& out, const RiskReport& report);
void write_gamma_csv(std::ostream& out, const RiskReport& report);
// Two-column x,y plot data.
void write_plot_csv(std::ostream& out, const std::string& x_label, const std::string& y_label,
                    std::span<const double> x, std::span<const double> y);

}  // namespace driftforge
