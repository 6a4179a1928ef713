#include "driftforge/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <thread>

#include "driftforge/csv.hpp"
#include "driftforge/errors.hpp"
#include "driftforge/sequential.hpp"

namespace driftforge {

void ExperimentConfig::validate() const {
  if (!drift.eval) throw ArgumentError("config: drift is not set");
  if (!(a < b)) throw ArgumentError("config: need a < b");
  if (T_list.empty()) throw ArgumentError("config: T_list is empty");
  for (double T : T_list) {
    if (!(T >= 32.0)) throw ArgumentError("config: every T must be >= 32");
  }
  if (reps < 1) throw ArgumentError("config: reps must be >= 1");
  if (!(dt > 0.0)) throw ArgumentError("config: dt must be positive");
  if (d < 0 || n < 0) throw ArgumentError("config: d and n must be >= 0 (0 selects the default)");
  if (beta_max < 1 || t_max < 1) throw ArgumentError("config: beta_max, t_max must be >= 1");
  if (quad_points < 2) throw ArgumentError("config: quad_points must be >= 2");
  if (s_star && !(*s_star > 0.0)) throw ArgumentError("config: s_star must be positive");
  if (c_override && !(*c_override >= 0.0)) throw ArgumentError("config: c_override must be >= 0");
  check_rho(rho, rho_exploratory);
}

QuadratureSpec ExperimentConfig::risk_quadrature() const {
  return {a, b, quad_points, quad_rule};
}

Setup make_setup(const ExperimentConfig& config, double T) {
  Schedule schedule = schedule_params(T);
  if (config.n > 0) schedule.n = config.n;
  if (config.t0) schedule.t0 = *config.t0;
  if (config.epsT) schedule.epsT = *config.epsT;
  if (!validate_h1(schedule).pass) {
    throw ArgumentError("config: schedule overrides violate H1 (16 <= t0 <= T/2, "
                        "sqrt(2)/t0^(1/8) <= epsT <= 1, n <= T)");
  }
  if (config.dt > schedule.t0 / 100.0) throw ArgumentError("config: dt must be <= t0/100");

  GridSpec grid = build_grid(config.a, config.b, schedule.n);
  BasisMatrix basis = build_basis(grid);
  const int d = config.d > 0 ? config.d : default_block_size(schedule.n);
  if (d > schedule.n) throw ArgumentError("config: d exceeds n");

  const double sigma_star = variance_bound(config.a, config.b, schedule.epsT);
  const double s_star = config.s_star.value_or(
      class_sup_bound(config.drift.L, config.drift.N, config.a, config.b));
  ShrinkageConfig shrink =
      ShrinkageConfig::make(d, sigma_star, s_star, config.drift.L, config.a, config.b, schedule.n);
  if (config.c_override) shrink.c = *config.c_override;

  WeightFamily family = weight_family(schedule.n, d, config.beta_max, config.t_max);

  std::vector<double> truth(grid.points.size());
  std::transform(grid.points.begin(), grid.points.end(), truth.begin(),
                 [&](double x) { return config.drift(x); });
  std::vector<double> spectrum = fourier_coefficients(truth, basis);

  return Setup{schedule, std::move(grid),   std::move(basis), shrink,
               std::move(family), std::move(truth), std::move(spectrum)};
}

int worker_count(int requested, int tasks) {
  int workers = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DRIFTFORGE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) workers = std::min(workers, cap);
  }
  return std::clamp(workers, 1, std::max(tasks, 1));
}

MeanSE mean_se(std::span<const double> xs) {
  MeanSE r;
  if (xs.empty()) return r;
  double sum = 0.0;
  for (double x : xs) sum += x;
  r.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return r;
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  r.se = std::sqrt(var / static_cast<double>(xs.size()));
  return r;
}

double l2_risk(const PiecewiseEstimate& estimate, const DriftSpec& drift,
               const QuadratureSpec& quad) {
  const double tol = 1e-12 * (estimate.grid.b - estimate.grid.a);
  if (std::abs(quad.lower - estimate.grid.a) > tol || std::abs(quad.upper - estimate.grid.b) > tol) {
    throw ArgumentError("l2_risk: quadrature must span exactly [a, b]");
  }
  const auto x = quad.nodes();
  const auto w = quad.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = estimate(x[i]) - drift(x[i]);
    acc += w[i] * diff * diff;
  }
  return acc;
}

double empirical_risk(std::span<const double> values, std::span<const double> truth,
                      const GridSpec& grid) {
  if (values.size() != truth.size()) throw ArgumentError("empirical_risk: length mismatch");
  std::vector<double> diff(values.size());
  for (std::size_t l = 0; l < diff.size(); ++l) diff[l] = values[l] - truth[l];
  return empirical_norm_sq(diff, grid);
}

const char* estimator_name(Estimator e) {
  switch (e) {
    case Estimator::wls: return "wls";
    case Estimator::improved: return "improved";
    case Estimator::adaptive: return "adaptive";
  }
  return "?";
}

namespace {

struct Needs {
  bool fixed_lambda = false;  // wls and improved at the given lambda
  bool adaptive = false;
  bool family = false;        // every member, wls and improved
  bool integral = false;
};

struct RepOutcome {
  bool ok = false;
  bool gamma = false;
  double sigma_ratio = 0.0;
  double wls_emp = 0.0, wls_int = 0.0;
  double imp_emp = 0.0, imp_int = 0.0;
  double ada_emp = 0.0, ada_int = 0.0;
  std::size_t alpha_hat = 0;
  std::vector<double> member_emp;
  std::vector<double> member_imp_emp;
};

// ||lambda theta 1_Gamma - theta_true||^2 in coefficient space (Parseval on
// the complete orthonormal grid basis).
double coefficient_risk(const WeightVector& lambda, std::span<const double> theta, bool gamma,
                        std::span<const double> truth_spectrum) {
  double acc = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double est = gamma ? lambda.lambda[j] * theta[j] : 0.0;
    acc += (est - truth_spectrum[j]) * (est - truth_spectrum[j]);
  }
  return acc;
}

RepOutcome run_rep(const ExperimentConfig& config, const Setup& setup, const QuadratureSpec& quad,
                   std::uint64_t seed, const WeightVector& lambda, const Needs& needs) {
  RepOutcome out;
  try {
    const DiffusionPath path =
        simulate_path(config.drift, config.y0, setup.schedule.T, config.dt, seed);
    const SequentialObservations obs = regression_data(path, setup.grid, setup.schedule);
    out.gamma = obs.gamma;
    const double bound = variance_bound(setup.grid.a, setup.grid.b, setup.schedule.epsT);
    for (double s : obs.sigma_sq) out.sigma_ratio = std::max(out.sigma_ratio, s / bound);

    if (needs.fixed_lambda || needs.adaptive || needs.family) {
      const SpectralData spectral = spectral_data(obs, setup.basis);
      const auto theta_star = shrink(spectral.theta_hat, setup.shrinkage.d, setup.shrinkage.c);

      if (needs.fixed_lambda) {
        const auto wls = wls_fit(lambda, spectral.theta_hat, setup.basis, obs.gamma);
        const auto imp = improved_fit(lambda, theta_star, setup.basis, obs.gamma);
        out.wls_emp = empirical_risk(wls.values, setup.truth, setup.grid);
        out.imp_emp = empirical_risk(imp.values, setup.truth, setup.grid);
        if (needs.integral) {
          out.wls_int = l2_risk(wls, config.drift, quad);
          out.imp_int = l2_risk(imp, config.drift, quad);
        }
      }
      if (needs.adaptive) {
        const SelectionResult sel = select(setup.family, spectral, theta_star, config.rho,
                                           setup.grid.a, setup.grid.b, config.rho_exploratory);
        out.alpha_hat = sel.alpha_hat;
        const auto ada = improved_fit(sel.lambda_hat, theta_star, setup.basis, obs.gamma);
        out.ada_emp = empirical_risk(ada.values, setup.truth, setup.grid);
        if (needs.integral) out.ada_int = l2_risk(ada, config.drift, quad);
      }
      if (needs.family) {
        for (const auto& member : setup.family.members) {
          out.member_emp.push_back(
              coefficient_risk(member, spectral.theta_hat, obs.gamma, setup.truth_spectrum));
          out.member_imp_emp.push_back(
              coefficient_risk(member, theta_star, obs.gamma, setup.truth_spectrum));
        }
      }
    }
    out.ok = true;
  } catch (const std::exception&) {
    out.ok = false;
  }
  return out;
}

std::vector<RepOutcome> run_all(const ExperimentConfig& config, const Setup& setup,
                                const WeightVector& lambda, const Needs& needs) {
  const QuadratureSpec quad = config.risk_quadrature();
  std::vector<RepOutcome> out(static_cast<std::size_t>(config.reps));
  const int workers = worker_count(config.threads, config.reps);
  auto task = [&](int i) {
    out[static_cast<std::size_t>(i)] =
        run_rep(config, setup, quad, config.base_seed + static_cast<std::uint64_t>(i), lambda, needs);
  };
  if (workers <= 1) {
    for (int i = 0; i < config.reps; ++i) task(i);
    return out;
  }
  std::atomic<int> next{0};
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < config.reps; i = next++) task(i);
      });
    }
  }
  return out;
}

// Merge in rep order so that results do not depend on scheduling.
struct Merged {
  std::vector<RepOutcome> outcomes;
  std::vector<const RepOutcome*> ok;
  int failed = 0;
  int gamma_failures = 0;
  double max_sigma_ratio = 0.0;
  int violations = 0;
};

Merged merge(std::vector<RepOutcome> reps) {
  Merged m;
  m.outcomes = std::move(reps);
  for (const auto& r : m.outcomes) {
    if (!r.ok) {
      ++m.failed;
      continue;
    }
    m.ok.push_back(&r);
    if (!r.gamma) ++m.gamma_failures;
    m.max_sigma_ratio = std::max(m.max_sigma_ratio, r.sigma_ratio);
    if (r.sigma_ratio > 1.0 + 1e-12) ++m.violations;
  }
  return m;
}

template <class F>
MeanSE collect(const Merged& m, F&& field) {
  std::vector<double> xs;
  xs.reserve(m.ok.size());
  for (const RepOutcome* r : m.ok) xs.push_back(field(*r));
  return mean_se(xs);
}

double fail_rate(const Merged& m) {
  return m.ok.empty() ? 0.0 : static_cast<double>(m.gamma_failures) / static_cast<double>(m.ok.size());
}

void absorb(RiskReport& report, const Merged& m, const Setup& setup) {
  report.max_sigma_ratio = std::max(report.max_sigma_ratio, m.max_sigma_ratio);
  report.variance_bound_violations += m.violations;
  report.truth_spectrum = setup.truth_spectrum;
}

WeightVector resolve_lambda(const std::optional<WeightVector>& lambda, const Setup& setup) {
  if (!lambda) return WeightVector::leading(setup.grid.n, setup.shrinkage.d);
  if (lambda->lambda.size() != static_cast<std::size_t>(setup.grid.n)) {
    throw ArgumentError("weight vector length does not match n");
  }
  lambda->validate();
  return *lambda;
}

}  // namespace

RiskReport mc_risk(const ExperimentConfig& config, Estimator estimator,
                   const std::optional<WeightVector>& lambda) {
  config.validate();
  RiskReport report;
  for (double T : config.T_list) {
    const Setup setup = make_setup(config, T);
    const WeightVector lam = resolve_lambda(lambda, setup);
    Needs needs;
    needs.integral = true;
    needs.fixed_lambda = estimator != Estimator::adaptive;
    needs.adaptive = estimator == Estimator::adaptive;
    const Merged m = merge(run_all(config, setup, lam, needs));

    RiskRow row;
    row.estimator = estimator_name(estimator);
    row.T = T;
    row.n = setup.grid.n;
    row.d = setup.shrinkage.d;
    row.reps_used = static_cast<int>(m.ok.size());
    row.reps_failed = m.failed;
    row.gamma_fail_rate = fail_rate(m);
    switch (estimator) {
      case Estimator::wls:
        row.empirical = collect(m, [](const RepOutcome& r) { return r.wls_emp; });
        row.integral = collect(m, [](const RepOutcome& r) { return r.wls_int; });
        break;
      case Estimator::improved:
        row.empirical = collect(m, [](const RepOutcome& r) { return r.imp_emp; });
        row.integral = collect(m, [](const RepOutcome& r) { return r.imp_int; });
        break;
      case Estimator::adaptive:
        row.empirical = collect(m, [](const RepOutcome& r) { return r.ada_emp; });
        row.integral = collect(m, [](const RepOutcome& r) { return r.ada_int; });
        break;
    }
    report.risks.push_back(row);
    absorb(report, m, setup);
  }
  return report;
}

RiskReport delta_n(const ExperimentConfig& config, const std::optional<WeightVector>& lambda) {
  config.validate();
  RiskReport report;
  for (double T : config.T_list) {
    const Setup setup = make_setup(config, T);
    const WeightVector lam = resolve_lambda(lambda, setup);
    Needs needs;
    needs.fixed_lambda = true;
    const Merged m = merge(run_all(config, setup, lam, needs));

    DeltaSummary s;
    s.T = T;
    s.n = setup.grid.n;
    s.d = setup.shrinkage.d;
    s.delta = collect(m, [](const RepOutcome& r) { return r.imp_emp - r.wls_emp; });
    s.c = setup.shrinkage.c;
    s.c_sq = s.c * s.c;
    s.sigma_star = setup.shrinkage.sigma_star;
    s.s_star = setup.shrinkage.s_star;
    s.L = setup.shrinkage.L;
    s.a = setup.grid.a;
    s.b = setup.grid.b;
    s.risk_wls = collect(m, [](const RepOutcome& r) { return r.wls_emp; });
    s.risk_improved = collect(m, [](const RepOutcome& r) { return r.imp_emp; });
    s.gamma_fail_rate = fail_rate(m);
    s.reps_used = static_cast<int>(m.ok.size());
    s.reps_failed = m.failed;
    report.deltas.push_back(s);
    absorb(report, m, setup);
  }
  return report;
}

RiskReport oracle_report(const ExperimentConfig& config) {
  config.validate();
  RiskReport report;
  for (double T : config.T_list) {
    const Setup setup = make_setup(config, T);
    Needs needs;
    needs.adaptive = true;
    needs.family = true;
    const Merged m =
        merge(run_all(config, setup, WeightVector::leading(setup.grid.n, setup.shrinkage.d), needs));

    OracleSummary s;
    s.T = T;
    s.n = setup.grid.n;
    s.d = setup.shrinkage.d;
    s.rho = config.rho;
    s.constant = (1.0 + 6.0 * config.rho) / (1.0 - 6.0 * config.rho);
    s.risk_adaptive = collect(m, [](const RepOutcome& r) { return r.ada_emp; });
    s.member_index = setup.family.index;
    s.selection_counts.assign(setup.family.size(), 0);
    for (const RepOutcome* r : m.ok) ++s.selection_counts[r->alpha_hat];
    for (std::size_t i = 0; i < setup.family.size(); ++i) {
      s.member_risk.push_back(collect(m, [i](const RepOutcome& r) { return r.member_emp[i]; }));
      s.member_improved_risk.push_back(
          collect(m, [i](const RepOutcome& r) { return r.member_imp_emp[i]; }));
    }
    const auto best = std::min_element(s.member_risk.begin(), s.member_risk.end(),
                                       [](const MeanSE& x, const MeanSE& y) { return x.mean < y.mean; });
    s.oracle_argmin = static_cast<std::size_t>(best - s.member_risk.begin());
    s.oracle_min = best->mean;
    s.oracle_ratio = s.oracle_min > 0.0 ? s.risk_adaptive.mean / s.oracle_min : 0.0;
    s.residual_r_n = s.risk_adaptive.mean - s.constant * s.oracle_min;
    s.gamma_fail_rate = fail_rate(m);
    s.reps_used = static_cast<int>(m.ok.size());
    s.reps_failed = m.failed;
    report.oracles.push_back(std::move(s));
    absorb(report, m, setup);
  }
  return report;
}

RiskReport gamma_failure_rate(const ExperimentConfig& config) {
  config.validate();
  RiskReport report;
  for (double T : config.T_list) {
    const Setup setup = make_setup(config, T);
    const Merged m = merge(run_all(config, setup, WeightVector::ones(setup.grid.n), Needs{}));
    GammaRate g;
    g.T = T;
    g.n = setup.grid.n;
    g.reps_used = static_cast<int>(m.ok.size());
    g.failures = m.gamma_failures;
    g.rate = fail_rate(m);
    report.gamma.push_back(g);
    absorb(report, m, setup);
  }
  return report;
}

KernelDiagnostics kernel_diagnostics(const ExperimentConfig& config, double T) {
  config.validate();
  const Setup setup = make_setup(config, T);
  struct Rep {
    bool ok = false;
    double max_bias = 0.0;
    double sigma_ratio = 0.0;
    std::vector<double> residuals;
  };
  std::vector<Rep> reps(static_cast<std::size_t>(config.reps));
  auto task = [&](int i) {
    Rep& r = reps[static_cast<std::size_t>(i)];
    try {
      const auto path = simulate_path(config.drift, config.y0, T, config.dt,
                                      config.base_seed + static_cast<std::uint64_t>(i));
      const auto obs = regression_data(path, setup.grid, setup.schedule, &config.drift);
      const double bound = variance_bound(setup.grid.a, setup.grid.b, setup.schedule.epsT);
      for (std::size_t k = 0; k < obs.H.size(); ++k) {
        r.sigma_ratio = std::max(r.sigma_ratio, obs.sigma_sq[k] / bound);
        const double bk = (*obs.B)[k];
        r.max_bias = std::max(r.max_bias, std::abs(bk));
        if (!obs.attained[k]) continue;
        r.residuals.push_back(std::sqrt(obs.H[k]) * (obs.s_tilde[k] - setup.truth[k] - bk));
      }
      r.ok = true;
    } catch (const std::exception&) {
      r.ok = false;
    }
  };
  const int workers = worker_count(config.threads, config.reps);
  if (workers <= 1) {
    for (int i = 0; i < config.reps; ++i) task(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < config.reps; i = next++) task(i);
      });
    }
  }

  KernelDiagnostics diag;
  diag.T = T;
  diag.h = setup.grid.h;
  for (const Rep& r : reps) {
    if (!r.ok) {
      ++diag.reps_failed;
      continue;
    }
    diag.max_abs_bias.push_back(r.max_bias);
    diag.std_residuals.insert(diag.std_residuals.end(), r.residuals.begin(), r.residuals.end());
    diag.max_sigma_ratio = std::max(diag.max_sigma_ratio, r.sigma_ratio);
  }
  return diag;
}

void write_risk_csv(std::ostream& out, const RiskReport& report) {
  out << "estimator,T,n,d,reps_used,reps_failed,risk_n,risk_n_se,risk_l2,risk_l2_se,"
         "gamma_fail_rate\n";
  for (const auto& r : report.risks) {
    out << r.estimator << ',' << csv::real(r.T) << ',' << r.n << ',' << r.d << ',' << r.reps_used
        << ',' << r.reps_failed << ',' << csv::real(r.empirical.mean) << ','
        << csv::real(r.empirical.se) << ',' << csv::real(r.integral.mean) << ','
        << csv::real(r.integral.se) << ',' << csv::real(r.gamma_fail_rate) << '\n';
  }
}

void write_delta_csv(std::ostream& out, const RiskReport& report) {
  out << "T,n,d,reps_used,reps_failed,delta_hat,se,c,c_sq,sigma_star,s_star,L,a,b,risk_wls,"
         "risk_improved,gamma_fail_rate\n";
  for (const auto& s : report.deltas) {
    out << csv::real(s.T) << ',' << s.n << ',' << s.d << ',' << s.reps_used << ',' << s.reps_failed
        << ',' << csv::real(s.delta.mean) << ',' << csv::real(s.delta.se) << ',' << csv::real(s.c)
        << ',' << csv::real(s.c_sq) << ',' << csv::real(s.sigma_star) << ','
        << csv::real(s.s_star) << ',' << csv::real(s.L) << ',' << csv::real(s.a) << ','
        << csv::real(s.b) << ',' << csv::real(s.risk_wls.mean) << ','
        << csv::real(s.risk_improved.mean) << ',' << csv::real(s.gamma_fail_rate) << '\n';
  }
}

void write_oracle_csv(std::ostream& out, const RiskReport& report) {
  out << "T,n,d,rho,row,alpha_beta,alpha_t,risk,risk_se,improved_risk,selected_count,oracle_min,"
         "oracle_ratio,residual_r_n,constant,gamma_fail_rate\n";
  for (const auto& s : report.oracles) {
    auto prefix = [&](std::ostream& o) {
      o << csv::real(s.T) << ',' << s.n << ',' << s.d << ',' << csv::real(s.rho) << ',';
    };
    auto suffix = [&](std::ostream& o) {
      o << ',' << csv::real(s.oracle_min) << ',' << csv::real(s.oracle_ratio) << ','
        << csv::real(s.residual_r_n) << ',' << csv::real(s.constant) << ','
        << csv::real(s.gamma_fail_rate) << '\n';
    };
    prefix(out);
    out << "adaptive,,," << csv::real(s.risk_adaptive.mean) << ',' << csv::real(s.risk_adaptive.se)
        << ",," << s.reps_used;
    suffix(out);
    for (std::size_t i = 0; i < s.member_risk.size(); ++i) {
      prefix(out);
      out << "member," << s.member_index[i].beta << ',' << s.member_index[i].t << ','
          << csv::real(s.member_risk[i].mean) << ',' << csv::real(s.member_risk[i].se) << ','
          << csv::real(s.member_improved_risk[i].mean) << ',' << s.selection_counts[i];
      suffix(out);
    }
  }
}

void write_gamma_csv(std::ostream& out, const RiskReport& report) {
  out << "T,n,reps_used,failures,rate\n";
  for (const auto& g : report.gamma) {
    out << csv::real(g.T) << ',' << g.n << ',' << g.reps_used << ',' << g.failures << ','
        << csv::real(g.rate) << '\n';
  }
}

void write_plot_csv(std::ostream& out, const std::string& x_label, const std::string& y_label,
                    std::span<const double> x, std::span<const double> y) {
  out << x_label << ',' << y_label << '\n';
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    out << csv::real(x[i]) << ',' << csv::real(y[i]) << '\n';
  }
}

}  // namespace driftforge
