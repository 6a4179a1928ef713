#pragma once

#include <string>

#include "driftforge/bench.hpp"
#include "driftforge/errors.hpp"

namespace driftforge {

// Malformed or unreadable experiment configuration.
class ConfigError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

// Flat YAML mapping whose keys mirror ExperimentConfig fields:
//
//   drift: ou            # ou | cubic | piecewise
//   a: -0.25
//   b: 0.25
//   y0: 0
//   T_list: [100, 400]   # or a single horizon as  T: 400
//   reps: 500
//   base_seed: 1
//   dt: 1.0e-4
//   rho: 0.1
//   rho_exploratory: false
//   d: 0                 # 0 -> floor(sqrt(n))
//   n: 0                 # 0 -> floor(T)
//   beta_max: 3
//   t_max: 10
//   quad_points: 20000
//   quad_rule: midpoint  # midpoint | trapezoid
//   t0: ...              # optional schedule overrides (checked against H1)
//   epsT: ...
//   s_star: ...          # optional class sup bound override
//   c_override: ...      # optional shrinkage constant override
//   threads: 0
//
// Unknown keys and type mismatches are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Raw bytes of a config file; throws ConfigError if unreadable.
std::string read_config_text(const std::string& path);

// Resolved schedule for one horizon, as YAML with keys T, t0, epsT, n, a, b.
std::string schedule_yaml(const Schedule& schedule, double a, double b);

}  // namespace driftforge
