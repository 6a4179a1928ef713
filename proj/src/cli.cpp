#include "driftforge/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "driftforge/bench.hpp"
#include "driftforge/config.hpp"
#include "driftforge/csv.hpp"
#include "driftforge/selection.hpp"
#include "driftforge/sequential.hpp"

namespace driftforge::cli {

namespace {

struct Options {
  std::string config_path;
  std::string out_path;
  std::string suite;
  std::string plot_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
};

// Raised for failures after the configuration has been accepted.
class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::atoll(epoch));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PipelineError("cannot write '" + path + "'");
  out << content;
  if (!out) throw PipelineError("write failed for '" + path + "'");
}

struct Prepared {
  ExperimentConfig config;
  std::string digest;
  std::string started;
};

Prepared prepare(const Options& opt) {
  Prepared p;
  p.started = timestamp();
  const std::string text = read_config_text(opt.config_path);
  p.digest = sha256_hex(text);
  p.config = parse_config(text);
  if (opt.seed) p.config.base_seed = *opt.seed;
  if (opt.reps) {
    if (*opt.reps < 1) throw ConfigError("--reps must be >= 1");
    p.config.reps = *opt.reps;
  }
  return p;
}

void write_manifest(const std::string& command, const Options& opt, const Prepared& p,
                    const std::vector<std::string>& outputs,
                    const std::vector<std::pair<Schedule, GridSpec>>& schedules) {
  nlohmann::ordered_json m;
  m["tool"] = "driftforge";
  m["version"] = kVersion;
  m["command"] = command;
  m["config_path"] = opt.config_path;
  m["config_digest"] = p.digest;
  m["base_seed"] = p.config.base_seed;
  m["reps"] = p.config.reps;
  m["started"] = p.started;
  m["finished"] = timestamp();
  m["outputs"] = outputs;
  nlohmann::ordered_json sched = nlohmann::ordered_json::array();
  for (const auto& [s, g] : schedules) {
    sched.push_back({{"T", s.T}, {"t0", s.t0}, {"epsT", s.epsT}, {"n", s.n}, {"a", g.a}, {"b", g.b}});
  }
  m["schedule"] = sched;
  write_file(opt.out_path + ".manifest.json", m.dump(2) + "\n");
}

int cmd_simulate(const Options& opt) {
  const Prepared p = prepare(opt);
  const double T = p.config.T_list.front();
  const Setup setup = make_setup(p.config, T);

  std::ostringstream csv_out;
  try {
    const auto path = simulate_path(p.config.drift, p.config.y0, T, p.config.dt, p.config.base_seed);
    write_path_csv(csv_out, path, p.config.drift.label);
  } catch (const SimulationError& e) {
    throw PipelineError(e.what());
  }
  write_file(opt.out_path, csv_out.str());
  write_manifest("simulate", opt, p, {opt.out_path}, {{setup.schedule, setup.grid}});
  return kOk;
}

int cmd_estimate(const Options& opt) {
  const Prepared p = prepare(opt);
  const double T = p.config.T_list.front();
  const Setup setup = make_setup(p.config, T);

  AdaptiveResult res;
  SequentialObservations obs;
  try {
    const auto path = simulate_path(p.config.drift, p.config.y0, T, p.config.dt, p.config.base_seed);
    obs = regression_data(path, setup.grid, setup.schedule);
    res = adaptive_estimate(obs, setup.basis, setup.shrinkage, setup.family, p.config.rho,
                            p.config.rho_exploratory);
  } catch (const std::exception& e) {
    throw PipelineError(e.what());
  }

  std::ostringstream est;
  est << "l,x_l,S_star,alpha_index,alpha_beta,alpha_t,gamma_warning\n";
  for (std::size_t l = 0; l < res.estimate.values.size(); ++l) {
    est << (l + 1) << ',' << csv::real(setup.grid.points[l]) << ','
        << csv::real(res.estimate.values[l]) << ',' << (res.selection.alpha_hat + 1) << ','
        << res.selection.alpha.beta << ',' << res.selection.alpha.t << ','
        << (obs.gamma ? 0 : 1) << '\n';
  }
  std::ostringstream sel;
  write_selection_csv(sel, setup.family, res.selection);
  std::ostringstream ob;
  write_observations_csv(ob, obs, setup.grid);

  const std::string sel_path = opt.out_path + ".selection.csv";
  const std::string obs_path = opt.out_path + ".observations.csv";
  write_file(opt.out_path, est.str());
  write_file(sel_path, sel.str());
  write_file(obs_path, ob.str());
  if (!obs.gamma) {
    std::cerr << "warning: some stopping time exceeded T; the estimate is identically zero\n";
  }
  write_manifest("estimate", opt, p, {opt.out_path, sel_path, obs_path},
                 {{setup.schedule, setup.grid}});
  return kOk;
}

int cmd_bench(const Options& opt) {
  const Prepared p = prepare(opt);
  std::vector<std::pair<Schedule, GridSpec>> schedules;
  for (double T : p.config.T_list) {
    const Setup s = make_setup(p.config, T);
    schedules.emplace_back(s.schedule, s.grid);
  }

  RiskReport report;
  std::ostringstream out;
  std::vector<double> px, py;
  std::string xl, yl;
  try {
    if (opt.suite == "improve") {
      report = delta_n(p.config);
      write_delta_csv(out, report);
      xl = "T";
      yl = "delta_hat";
      for (const auto& s : report.deltas) {
        px.push_back(s.T);
        py.push_back(s.delta.mean);
      }
    } else if (opt.suite == "oracle") {
      report = oracle_report(p.config);
      write_oracle_csv(out, report);
      xl = "n";
      yl = "residual_r_n";
      for (const auto& s : report.oracles) {
        px.push_back(s.n);
        py.push_back(s.residual_r_n);
      }
    } else {
      report = gamma_failure_rate(p.config);
      write_gamma_csv(out, report);
      xl = "T";
      yl = "gamma_fail_rate";
      for (const auto& g : report.gamma) {
        px.push_back(g.T);
        py.push_back(g.rate);
      }
    }
  } catch (const ArgumentError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(e.what());
  }
  if (report.variance_bound_violations > 0) {
    throw PipelineError("sigma_k^2 exceeded sigma_* in some replication");
  }

  std::vector<std::string> outputs{opt.out_path};
  write_file(opt.out_path, out.str());
  if (!opt.plot_path.empty()) {
    std::ostringstream plot;
    write_plot_csv(plot, xl, yl, px, py);
    write_file(opt.plot_path, plot.str());
    outputs.push_back(opt.plot_path);
  }
  write_manifest("bench:" + opt.suite, opt, p, outputs, schedules);
  return kOk;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Sequential kernel, shrinkage and model-selection drift estimation for ergodic diffusions"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Options opt;
  auto common = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "experiment configuration (YAML)")->required();
    sub->add_option("--out", opt.out_path, "output CSV path")->required();
    sub->add_option("--seed", opt.seed, "override base_seed");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "simulate one path and write it as CSV");
  common(simulate);
  CLI::App* estimate = app.add_subcommand("estimate", "run the adaptive estimator on one path");
  common(estimate);
  CLI::App* bench = app.add_subcommand("bench", "Monte Carlo risk suites");
  common(bench);
  bench->add_option("--suite", opt.suite, "improve | oracle | gamma")
      ->required()
      ->check(CLI::IsMember({"improve", "oracle", "gamma"}));
  bench->add_option("--reps", opt.reps, "override reps");
  bench->add_option("--plot", opt.plot_path, "also write two-column plot data here");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(opt);
    if (estimate->parsed()) return cmd_estimate(opt);
    return cmd_bench(opt);
  } catch (const PipelineError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPipelineError;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPipelineError;
  }
}

}  // namespace driftforge::cli
