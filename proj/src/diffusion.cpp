#include "driftforge/diffusion.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include "driftforge/csv.hpp"

namespace driftforge {

DriftSpec drift_from_label(const std::string& label) {
  if (label == "ou") {
    return {[](double x) { return -x; }, 2.0, 2.0, label};
  }
  if (label == "cubic") {
    // S' ranges over [-1.225, -0.1]; |S'| >= 0.5 once x^2 >= 0.2.
    return {[](double x) { return -x * x * x / (1.0 + x * x) - 0.1 * x; }, 2.0, 2.0, label};
  }
  if (label == "piecewise") {
    return {[](double x) { return x < 0.0 ? -1.5 * x : -0.5 * x; }, 2.0, 2.0, label};
  }
  throw ArgumentError("unknown drift label '" + label + "'");
}

std::vector<std::string> drift_labels() { return {"ou", "cubic", "piecewise"}; }

std::size_t step_count(double T, double dt) {
  const double ratio = T / dt;
  return static_cast<std::size_t>(std::floor(ratio * (1.0 + 1e-12)));
}

DiffusionPath simulate_path(const DriftSpec& drift, double y0, double T, double dt,
                            std::uint64_t seed) {
  GaussianStream noise(seed);
  return simulate_path_with(drift, y0, T, dt, noise, seed);
}

void write_path_csv(std::ostream& out, const DiffusionPath& path, const std::string& drift_label) {
  out << "# drift=" << drift_label << " dt=" << csv::real(path.dt) << " seed=" << path.seed
      << " y0=" << csv::real(path.y0) << " T=" << csv::real(path.T) << '\n';
  out << "time,value\n";
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    out << csv::real(path.time(i)) << ',' << csv::real(path.values[i]) << '\n';
  }
}

void QuadratureSpec::validate() const {
  if (!(lower < upper)) throw ArgumentError("QuadratureSpec: lower must be < upper");
  if (points < 2) throw ArgumentError("QuadratureSpec: need at least 2 points");
}

std::vector<double> QuadratureSpec::nodes() const {
  validate();
  std::vector<double> x(static_cast<std::size_t>(points));
  if (rule == QuadratureRule::trapezoid) {
    const double step = (upper - lower) / (points - 1);
    for (int i = 0; i < points; ++i) x[i] = lower + i * step;
    x.back() = upper;
  } else {
    const double step = (upper - lower) / points;
    for (int i = 0; i < points; ++i) x[i] = lower + (i + 0.5) * step;
  }
  return x;
}

std::vector<double> QuadratureSpec::weights() const {
  validate();
  std::vector<double> w(static_cast<std::size_t>(points));
  if (rule == QuadratureRule::trapezoid) {
    const double step = (upper - lower) / (points - 1);
    std::fill(w.begin(), w.end(), step);
    w.front() = w.back() = 0.5 * step;
  } else {
    std::fill(w.begin(), w.end(), (upper - lower) / points);
  }
  return w;
}

QuadratureSpec default_density_quadrature(const DriftSpec& drift) {
  return {-(drift.N + 10.0), drift.N + 10.0, 20001, QuadratureRule::trapezoid};
}

namespace {

// Simpson's rule for int_x0^x1 S on a short piece.
double piece_integral(const DriftSpec& drift, double x0, double x1) {
  const double mid = 0.5 * (x0 + x1);
  return (x1 - x0) * (drift(x0) + 4.0 * drift(mid) + drift(x1)) / 6.0;
}

}  // namespace

InvariantDensity::InvariantDensity(DriftSpec drift, QuadratureSpec quad)
    : drift_(std::move(drift)), quad_(quad) {
  nodes_ = quad_.nodes();
  const auto w = quad_.weights();

  potential_.resize(nodes_.size());
  potential_[0] = 0.0;
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    potential_[i] = potential_[i - 1] + 2.0 * piece_integral(drift_, nodes_[i - 1], nodes_[i]);
  }
  shift_ = *std::max_element(potential_.begin(), potential_.end());
  if (!std::isfinite(shift_)) {
    throw DomainError("invariant_density: potential is not finite on the quadrature range");
  }

  double norm = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) norm += w[i] * std::exp(potential_[i] - shift_);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DomainError("invariant_density: normalizing integral is not finite");
  }
  // Mass piling up at the quadrature edges means exp(2 int S) is not
  // integrable there, i.e. the drift is not ergodic on this range.
  const double edge = std::max(std::exp(potential_.front() - shift_),
                               std::exp(potential_.back() - shift_));
  if (edge > 1e-12) {
    throw DomainError("invariant_density: density does not decay at the quadrature edges");
  }
  log_norm_ = std::log(norm);
  mass_ = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    mass_ += w[i] * std::exp(potential_[i] - shift_ - log_norm_);
  }
}

double InvariantDensity::potential(double x) const {
  // Anchor at the nearest node at or below x (or the first node).
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const std::size_t i = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
  return potential_[i] + 2.0 * piece_integral(drift_, nodes_[i], x);
}

double InvariantDensity::operator()(double x) const {
  return std::exp(potential(x) - shift_ - log_norm_);
}

double InvariantDensity::total_mass() const { return mass_; }

double invariant_density(const DriftSpec& drift, double x, const QuadratureSpec& quad) {
  return InvariantDensity(drift, quad)(x);
}

MembershipReport check_class_membership(const DriftSpec& drift, double a, double b, int probes) {
  if (probes < 100) throw ArgumentError("check_class_membership: probes must be >= 100");
  constexpr double tol = 1e-9;
  MembershipReport r;
  const double L = drift.L;
  const double N = drift.N;
  r.constants_ok = L > 1.0 && N > std::abs(a) + std::abs(b);

  // Lipschitz ratio on a grid spanning the interval and both tails.
  const double span = 3.0 * std::max({N, std::abs(a), std::abs(b), 1.0});
  double prev_x = -span;
  double prev_s = drift(prev_x);
  for (int i = 1; i < probes; ++i) {
    const double x = -span + 2.0 * span * i / (probes - 1);
    const double s = drift(x);
    r.lipschitz_ratio = std::max(r.lipschitz_ratio, std::abs(s - prev_s) / (x - prev_x));
    prev_x = x;
    prev_s = s;
  }
  r.lipschitz_ok = r.lipschitz_ratio <= L * (1.0 + tol);

  r.drift_at_N = std::abs(drift(N));
  r.drift_at_N_ok = r.drift_at_N <= L * (1.0 + tol);

  // Slope band on [N, span] and [-span, -N].
  r.tail_slope_min = std::numeric_limits<double>::infinity();
  r.tail_slope_max = -std::numeric_limits<double>::infinity();
  const int half = probes / 2;
  for (int side = -1; side <= 1; side += 2) {
    for (int i = 0; i + 1 < half; ++i) {
      const double u0 = N + (span - N) * i / (half - 1);
      const double u1 = N + (span - N) * (i + 1) / (half - 1);
      const double x0 = side > 0 ? u0 : -u1;
      const double x1 = side > 0 ? u1 : -u0;
      const double slope = (drift(x1) - drift(x0)) / (x1 - x0);
      r.tail_slope_min = std::min(r.tail_slope_min, slope);
      r.tail_slope_max = std::max(r.tail_slope_max, slope);
    }
  }
  r.tail_band_ok = r.tail_slope_min >= -L * (1.0 + tol) && r.tail_slope_max <= -1.0 / L + tol;

  r.pass = r.constants_ok && r.lipschitz_ok && r.drift_at_N_ok && r.tail_band_ok;
  return r;
}

}  // namespace driftforge
