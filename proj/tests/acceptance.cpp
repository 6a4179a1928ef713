// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
// Tolerances and Monte Carlo sizes are fixed here.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "driftforge/bench.hpp"
#include "driftforge/config.hpp"
#include "driftforge/selection.hpp"
#include "driftforge/sequential.hpp"

namespace fs = std::filesystem;
using namespace driftforge;

namespace {

constexpr double kGramTol = 1e-10;
constexpr double kDensityTol = 1e-6;
constexpr double kMassTol = 1e-6;
constexpr int kDensitySeeds = 50;
constexpr int kBiasReps = 100;
constexpr std::size_t kResidualPairs = 10000;
constexpr double kResidualMeanTol = 0.03;
constexpr double kResidualVarLo = 0.9, kResidualVarHi = 1.1;
constexpr int kGammaReps = 500;
constexpr double kGammaMax = 0.2;
constexpr int kDeltaReps = 2000;
constexpr int kOracleReps = 500;
constexpr double kReconstructTol = 1e-8;

double g_max_sigma_ratio = 0.0;
int g_sigma_violations = 0;
int g_failures = 0;

void track(double ratio, int violations) {
  g_max_sigma_ratio = std::max(g_max_sigma_ratio, ratio);
  g_sigma_violations += violations;
}
void track(const RiskReport& r) { track(r.max_sigma_ratio, r.variance_bound_violations); }

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++g_failures;
  fmt::print("[{}] {:>2} {}: {}\n", pass ? "PASS" : "FAIL", id, name, detail);
  std::fflush(stdout);
}

ExperimentConfig ou_default() { return load_config(std::string(DRIFTFORGE_CONFIGS) + "/ou_default.yaml"); }

void criterion_gram() {
  double worst = 0.0;
  for (int n : {2, 4, 8, 16, 64, 256, 512}) {
    const auto B = build_basis(build_grid(-0.25, 0.25, n));
    const auto un = static_cast<std::size_t>(n);
    const long double cell = 0.5L / n;
    for (std::size_t i = 0; i < un; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        long double acc = 0.0L;
        for (std::size_t l = 0; l < un; ++l) acc += static_cast<long double>(B(i, l)) * B(j, l);
        worst = std::max(worst, static_cast<double>(std::fabs(cell * acc - (i == j ? 1.0L : 0.0L))));
      }
    }
  }
  report(1, "orthonormality", worst <= kGramTol,
         fmt::format("max |Gram - I| = {:.3e} over n in {{2,4,8,16,64,256,512}} (tol {:.0e})", worst,
                     kGramTol));
}

void criterion_density() {
  const auto ou = drift_from_label("ou");
  const InvariantDensity q(ou, default_density_quadrature(ou));
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double x = -3.0 + 6.0 * i / 100.0;
    worst = std::max(worst, std::abs(q(x) - std::exp(-x * x) / std::sqrt(std::numbers::pi)));
  }
  const double mass_err = std::abs(q.total_mass() - 1.0);
  report(2, "invariant density", worst <= kDensityTol && mass_err <= kMassTol,
         fmt::format("max abs error {:.3e} at 101 probes on [-3,3], |mass - 1| = {:.3e} (tol {:.0e})",
                     worst, mass_err, kDensityTol));
}

void criterion_kernel_density() {
  // x_k = 0 is grid point 10 of [-1, 1] with n = 20, h = 0.05.
  const auto ou = drift_from_label("ou");
  const auto g = build_grid(-1.0, 1.0, 20);
  const double t0 = 500.0;
  std::vector<double> qs;
  for (int s = 1; s <= kDensitySeeds; ++s) {
    const auto p = simulate_path(ou, 0.0, t0, 1e-3, static_cast<std::uint64_t>(s));
    qs.push_back(estimate_density(p, t0, g)[9]);
  }
  const auto m = mean_se(qs);
  const double target = 1.0 / std::sqrt(std::numbers::pi);
  const double dev = std::abs(m.mean - target);
  report(3, "kernel density at 0", dev <= 3.0 * m.se,
         fmt::format("mean q_hat(0) = {:.5f} +- {:.5f} over {} seeds, 1/sqrt(pi) = {:.5f}, |dev| = {:.2f} SE "
                     "(h = {}, t0 = {})",
                     m.mean, m.se, kDensitySeeds, target, dev / m.se, g.h, t0));
}

void criteria_kernel(const ExperimentConfig& base) {
  auto c = base;
  c.reps = kBiasReps;
  const double T = 400.0;
  const auto diag = kernel_diagnostics(c, T);
  track(diag.max_sigma_ratio, diag.max_sigma_ratio > 1.0 + 1e-12 ? 1 : 0);
  const double L = c.drift.L;
  const double bound = L * diag.h + 2.0 * L * c.dt;
  int within = 0;
  double worst = 0.0;
  for (double b : diag.max_abs_bias) {
    within += b <= bound;
    worst = std::max(worst, b);
  }
  report(4, "approximation bound", diag.reps_failed == 0 && within == kBiasReps,
         fmt::format("{}/{} reps with max_k |B_k| <= L h + 2 L dt = {:.4e}; worst {:.4e} (T = {}, n = {})",
                     within, kBiasReps, bound, worst, T, static_cast<int>(T)));

  // Residual pool: keep adding replications until enough pairs.
  std::vector<double> res = diag.std_residuals;
  auto more = c;
  more.reps = 20;
  more.base_seed = c.base_seed + static_cast<std::uint64_t>(c.reps);
  while (res.size() < kResidualPairs) {
    const auto d2 = kernel_diagnostics(more, T);
    track(d2.max_sigma_ratio, d2.max_sigma_ratio > 1.0 + 1e-12 ? 1 : 0);
    res.insert(res.end(), d2.std_residuals.begin(), d2.std_residuals.end());
    more.base_seed += static_cast<std::uint64_t>(more.reps);
  }
  double sum = 0.0;
  for (double r : res) sum += r;
  const double mean = sum / static_cast<double>(res.size());
  double ss = 0.0;
  for (double r : res) ss += (r - mean) * (r - mean);
  const double var = ss / static_cast<double>(res.size() - 1);
  report(5, "standardized residuals",
         std::abs(mean) <= kResidualMeanTol && var >= kResidualVarLo && var <= kResidualVarHi,
         fmt::format("{} pairs: mean {:+.4f} (tol {}), variance {:.4f} (band [{}, {}])", res.size(), mean,
                     kResidualMeanTol, var, kResidualVarLo, kResidualVarHi));
}

void criterion_gamma(const ExperimentConfig& base) {
  auto c = base;
  c.T_list = {100.0, 400.0};
  c.reps = kGammaReps;
  const auto r = gamma_failure_rate(c);
  track(r);
  const double r100 = r.gamma.at(0).rate, r400 = r.gamma.at(1).rate;
  const bool decay = r400 <= r100;
  const bool small = r100 <= kGammaMax && r400 <= kGammaMax;
  report(7, "Gamma decay", decay && small,
         fmt::format("P(Gamma^c) = {:.3f} at T = 100, {:.3f} at T = 400 over {} reps; decay {}, both <= {} {}",
                     r100, r400, kGammaReps, decay ? "holds" : "fails", kGammaMax, small ? "holds" : "fails"));
}

void criterion_delta(const ExperimentConfig& base) {
  auto c = base;
  c.T_list = {400.0};
  c.d = 20;
  c.reps = kDeltaReps;
  const auto r = delta_n(c);
  track(r);
  const auto& s = r.deltas.at(0);
  const bool improve = s.delta.mean + 2.0 * s.delta.se < -s.c_sq;

  auto z = c;
  z.reps = 50;
  z.c_override = 0.0;
  const auto rz = delta_n(z);
  track(rz);
  const double dz = rz.deltas.at(0).delta.mean;
  report(8, "risk improvement", improve && dz == 0.0 && s.reps_failed == 0,
         fmt::format("delta_hat = {:.5f}, SE = {:.5f}, delta_hat + 2 SE = {:.5f} < -c^2 = {:.5f} ({}); "
                     "c = 0 gives delta_hat = {} ({} reps, n = {}, d = {}, Gamma^c rate {:.3f})",
                     s.delta.mean, s.delta.se, s.delta.mean + 2.0 * s.delta.se, -s.c_sq,
                     improve ? "holds" : "fails", dz, s.reps_used, s.n, s.d, s.gamma_fail_rate));
}

void criterion_oracle(const ExperimentConfig& base) {
  auto c = base;
  c.T_list = {100.0, 400.0};
  c.d = 0;
  c.reps = kOracleReps;
  const auto r = oracle_report(c);
  track(r);
  const auto& a = r.oracles.at(0);
  const auto& b = r.oracles.at(1);
  const bool dec = b.residual_r_n < a.residual_r_n;
  report(9, "oracle inequality", dec && a.reps_failed == 0 && b.reps_failed == 0,
         fmt::format("n = 100: risk(S*) {:.5f}, min member {:.5f}, r_n {:+.5f}; "
                     "n = 400: risk(S*) {:.5f}, min member {:.5f}, r_n {:+.5f}; constant {} ({} reps)",
                     a.risk_adaptive.mean, a.oracle_min, a.residual_r_n, b.risk_adaptive.mean,
                     b.oracle_min, b.residual_r_n, a.constant, kOracleReps));
}

void criterion_reconstruction() {
  const int n = 400, d = 20;
  const auto g = build_grid(-0.25, 0.25, n);
  const auto B = build_basis(g);
  std::vector<double> Y(n, 0.0);
  for (int j = 0; j < d; ++j) {
    const double coef = std::cos(0.7 * j) / (1.0 + j);
    for (int l = 0; l < n; ++l) Y[l] += coef * B(j, l);
  }
  SequentialObservations obs;
  obs.Y = Y;
  obs.sigma_sq.assign(n, 0.0);
  obs.gamma = true;
  auto cfg = ShrinkageConfig::make(d, 1.0, 1.0, 2.0, g.a, g.b, n);
  cfg.c = 0.0;

  const auto th = fourier_coefficients(Y, B);
  const auto full = wls_fit(WeightVector::ones(n), shrink(th, d, cfg.c), B, true);
  const auto ada = adaptive_estimate(obs, B, cfg, weight_family(n, d, 3, 10), 0.1);
  double scale = 0.0, worst = 0.0;
  for (int l = 0; l < n; ++l) {
    scale = std::max(scale, std::abs(Y[l]));
    worst = std::max({worst, std::abs(full.values[l] - Y[l]), std::abs(ada.estimate.values[l] - Y[l])});
  }
  const double rel = worst / scale;
  report(10, "exact reconstruction", rel <= kReconstructTol,
         fmt::format("max relative error {:.3e} (lambda = 1 and adaptive, n = {}, d = {}, tol {:.0e})", rel,
                     n, d, kReconstructTol));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void criterion_determinism() {
  const fs::path dir = fs::temp_directory_path() / ("driftforge_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cfgs = DRIFTFORGE_CONFIGS;
  const fs::path small = dir / "small.yaml";
  std::ofstream(small) << "drift: ou\na: -0.25\nb: 0.25\nT: 64\nreps: 4\ndt: 0.001\nrho: 0.1\n";

  const std::vector<std::pair<std::string, std::string>> runs{
      {"simulate", "simulate --config " + small.string()},
      {"estimate", "estimate --config " + cfgs + "/ou_default.yaml"},
      {"improve", "bench --suite improve --reps 4 --config " + cfgs + "/ou_default.yaml"},
      {"oracle", "bench --suite oracle --reps 4 --config " + cfgs + "/ou_oracle.yaml"},
      {"gamma", "bench --suite gamma --reps 4 --config " + cfgs + "/ou_gamma.yaml"},
  };
  int identical = 0, files = 0;
  bool ok = true;
  for (const auto& [name, args] : runs) {
    const bool bench = args.rfind("bench", 0) == 0;
    for (const char* pass : {"a", "b"}) {
      // Same relative output names in separate directories, so manifests compare as-is.
      const fs::path run_dir = dir / name / pass;
      fs::create_directories(run_dir);
      const std::string cmd =
          fmt::format("cd \"{}\" && SOURCE_DATE_EPOCH=1700000000 \"{}\" {} --out out.csv{} >/dev/null 2>&1",
                      run_dir.string(), DRIFTFORGE_BIN, args, bench ? " --plot plot.csv" : "");
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) ok = false;
    }
    for (const auto& entry : fs::directory_iterator(dir / name / "a")) {
      ++files;
      const fs::path other = dir / name / "b" / entry.path().filename();
      if (fs::exists(other) && slurp(entry.path()) == slurp(other)) ++identical;
    }
  }
  fs::remove_all(dir);
  report(11, "CLI determinism", ok && files > 0 && identical == files,
         fmt::format("{}/{} output files byte-identical across reruns of simulate, estimate and three bench suites",
                     identical, files));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentConfig base = ou_default();

  criterion_gram();
  criterion_density();
  criterion_kernel_density();
  criteria_kernel(base);
  criterion_gamma(base);
  criterion_delta(base);
  criterion_oracle(base);
  report(6, "variance bound", g_sigma_violations == 0 && g_max_sigma_ratio <= 1.0,
         fmt::format("max sigma_k^2 / sigma_* = {:.4f} over every replication above, {} violations",
                     g_max_sigma_ratio, g_sigma_violations));
  criterion_reconstruction();
  criterion_determinism();

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fmt::print("{} criteria failed; {:.0f} s\n", g_failures, secs);
  return g_failures == 0 ? 0 : 1;
}
