#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "driftforge/errors.hpp"

namespace driftforge {

// Drift S of dy = S(y) dt + dw together with the constants (L, N) of the
// ergodic class it is claimed to belong to.
struct DriftSpec {
  std::function<double(double)> eval;
  double L = 2.0;
  double N = 2.0;
  std::string label;

  double operator()(double x) const { return eval(x); }
};

// Built-in drifts with certified class constants.
//   "ou"        S(x) = -x                       (L = 2, N = 2)
//   "cubic"     S(x) = -x^3/(1+x^2) - 0.1 x     (L = 2, N = 2)
//   "piecewise" S(x) = -1.5x (x<0), -0.5x (x>=0) (L = 2, N = 2)
DriftSpec drift_from_label(const std::string& label);
std::vector<std::string> drift_labels();

struct DiffusionPath {
  double y0 = 0.0;
  double dt = 0.0;
  double T = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> values;  // y at i*dt, i = 0..M

  std::size_t steps() const { return values.empty() ? 0 : values.size() - 1; }
  double time(std::size_t i) const { return static_cast<double>(i) * dt; }
};

// Number of Euler steps covering [0, T]: floor(T/dt), robust to T/dt landing
// a few ulps below an integer.
std::size_t step_count(double T, double dt);

// Seeded standard Gaussian stream (Boost ziggurat over a 64-bit Mersenne
// twister; Boost fixes the algorithm, so streams are identical across
// standard libraries).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return normal_(engine_); }

 private:
  boost::random::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
};

// Euler-Maruyama with an arbitrary source of standard Gaussian draws.
// values[i+1] = values[i] + S(values[i]) dt + sqrt(dt) g_i.
template <class Noise>
DiffusionPath simulate_path_with(const DriftSpec& drift, double y0, double T, double dt,
                                 Noise&& noise, std::uint64_t seed = 0) {
  if (!(dt > 0.0)) throw ArgumentError("simulate_path: dt must be positive");
  if (!(T > 0.0)) throw ArgumentError("simulate_path: T must be positive");
  if (dt > T) throw ArgumentError("simulate_path: dt must not exceed T");

  const std::size_t m = step_count(T, dt);
  DiffusionPath path;
  path.y0 = y0;
  path.dt = dt;
  path.T = T;
  path.seed = seed;
  path.values.resize(m + 1);
  path.values[0] = y0;

  const double sqrt_dt = std::sqrt(dt);
  double y = y0;
  for (std::size_t i = 0; i < m; ++i) {
    const double s = drift(y);
    if (!std::isfinite(s)) {
      throw SimulationError("simulate_path: non-finite drift at state " + std::to_string(y), y,
                            static_cast<double>(i) * dt);
    }
    y = y + s * dt + sqrt_dt * noise();
    if (!std::isfinite(y)) {
      throw SimulationError("simulate_path: state diverged", y, static_cast<double>(i + 1) * dt);
    }
    path.values[i + 1] = y;
  }
  return path;
}

DiffusionPath simulate_path(const DriftSpec& drift, double y0, double T, double dt,
                            std::uint64_t seed);

// Two-column CSV (time,value) preceded by '#' comment lines with provenance.
void write_path_csv(std::ostream& out, const DiffusionPath& path, const std::string& drift_label);

enum class QuadratureRule { trapezoid, midpoint };

struct QuadratureSpec {
  double lower = -12.0;
  double upper = 12.0;
  int points = 20001;
  QuadratureRule rule = QuadratureRule::trapezoid;

  void validate() const;
  std::vector<double> nodes() const;
  std::vector<double> weights() const;
};

// Default density quadrature for a class drift: 20001-point trapezoid on
// [-(N+10), N+10].
QuadratureSpec default_density_quadrature(const DriftSpec& drift);

// Invariant density q(x) = exp(2 int_0^x S) / int exp(2 int_0^y S) dy with the
// normalizing integral computed once by the given quadrature.
class InvariantDensity {
 public:
  InvariantDensity(DriftSpec drift, QuadratureSpec quad);

  double operator()(double x) const;
  // Quadrature of q over the normalization nodes (1 up to rounding).
  double total_mass() const;

 private:
  double potential(double x) const;  // 2 int_0^x S, up to the shift below

  DriftSpec drift_;
  QuadratureSpec quad_;
  std::vector<double> nodes_;
  std::vector<double> potential_;  // 2 int_{nodes_[0]}^{node} S
  double shift_ = 0.0;             // max potential, subtracted before exp
  double log_norm_ = 0.0;
  double mass_ = 0.0;
};

double invariant_density(const DriftSpec& drift, double x, const QuadratureSpec& quad);

struct MembershipReport {
  double lipschitz_ratio = 0.0;  // max finite-difference slope magnitude
  bool lipschitz_ok = false;
  double drift_at_N = 0.0;  // |S(N)|
  bool drift_at_N_ok = false;
  double tail_slope_min = 0.0;  // finite-difference slopes on |x| >= N
  double tail_slope_max = 0.0;
  bool tail_band_ok = false;
  bool constants_ok = false;  // L > 1 and N > |a| + |b|
  bool pass = false;
};

MembershipReport check_class_membership(const DriftSpec& drift, double a, double b,
                                        int probes = 10000);

}  // namespace driftforge
