#include "driftforge/sequential.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "driftforge/csv.hpp"

namespace driftforge {

namespace {

// Calls f(k) for every 0-based window k with |y - x_k| <= h. Windows share
// endpoints, so a state can lie in two of them.
template <class F>
void for_each_window(const GridSpec& grid, double y, F&& f) {
  const double u = (y - grid.a) / (grid.b - grid.a) * grid.n;  // x_k sits at u = k
  const long centre = std::lround(u);
  for (long k = centre - 1; k <= centre + 1; ++k) {
    if (k < 1 || k > grid.n) continue;
    if (std::abs(y - grid.points[k - 1]) <= grid.h) f(static_cast<std::size_t>(k - 1));
  }
}

// First mesh index whose time is >= t.
std::size_t first_index_at_or_after(double t, double dt) {
  return static_cast<std::size_t>(std::ceil(t / dt * (1.0 - 1e-12)));
}

}  // namespace

std::vector<double> estimate_density(const DiffusionPath& path, double t0, const GridSpec& grid) {
  if (!(t0 > 0.0)) throw ArgumentError("estimate_density: t0 must be positive");
  if (t0 > path.T * (1.0 + 1e-12)) throw ArgumentError("estimate_density: t0 exceeds path horizon");
  if (path.dt > t0 / 100.0) throw ArgumentError("estimate_density: path mesh coarser than t0/100");

  std::vector<std::size_t> counts(static_cast<std::size_t>(grid.n), 0);
  const std::size_t end = std::min(first_index_at_or_after(t0, path.dt), path.values.size());
  for (std::size_t i = 0; i < end; ++i) {
    for_each_window(grid, path.values[i], [&](std::size_t k) { ++counts[k]; });
  }
  std::vector<double> q(counts.size());
  const double scale = path.dt / (2.0 * t0 * grid.h);
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = static_cast<double>(counts[k]) * scale;
  return q;
}

std::vector<double> truncate_density(std::span<const double> q_hat, double epsT) {
  std::vector<double> out(q_hat.size());
  std::transform(q_hat.begin(), q_hat.end(), out.begin(),
                 [epsT](double q) { return std::max(q, epsT); });
  return out;
}

std::vector<double> thresholds(std::span<const double> q_tilde, double T, double t0, double h,
                               double epsT) {
  std::vector<double> H(q_tilde.size());
  for (std::size_t k = 0; k < H.size(); ++k) {
    H[k] = (T - t0) * (2.0 * q_tilde[k] - epsT * epsT) * h;
  }
  return H;
}

std::vector<double> variances(std::span<const double> q_tilde, double T, double t0, int n,
                              double a, double b, double epsT) {
  std::vector<double> s(q_tilde.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    s[k] = n / ((T - t0) * (q_tilde[k] - epsT * epsT / 2.0) * (b - a));
  }
  return s;
}

double variance_bound(double a, double b, double epsT) { return 4.0 / ((b - a) * epsT); }

SequentialEstimate sequential_estimate(const DiffusionPath& path, const GridSpec& grid, double t0,
                                       double T, std::span<const double> H,
                                       const DriftSpec* truth) {
  const auto n = static_cast<std::size_t>(grid.n);
  if (H.size() != n) throw ArgumentError("sequential_estimate: threshold count != grid size");
  if (T > path.T * (1.0 + 1e-12)) throw ArgumentError("sequential_estimate: T exceeds path horizon");

  const double dt = path.dt;
  std::vector<std::size_t> active(n, 0);  // steps with kernel weight 1 so far
  std::vector<double> stoch(n, 0.0);
  std::vector<double> bias(n, 0.0);
  std::vector<double> s_at_x(n, 0.0);
  if (truth != nullptr) {
    for (std::size_t k = 0; k < n; ++k) s_at_x[k] = (*truth)(grid.points[k]);
  }

  SequentialEstimate est;
  est.tau.assign(n, T + dt);
  est.attained.assign(n, 0);
  std::size_t remaining = n;

  const std::size_t begin = first_index_at_or_after(t0, dt);
  const std::size_t end = std::min(step_count(T, dt), path.steps());
  for (std::size_t i = begin; i < end && remaining > 0; ++i) {
    const double y = path.values[i];
    const double dy = path.values[i + 1] - y;
    for_each_window(grid, y, [&](std::size_t k) {
      if (est.attained[k]) return;
      const double mass = static_cast<double>(active[k]) * dt;
      double w = 1.0;
      bool stop = false;
      if (mass + dt >= H[k] * (1.0 - 1e-12)) {
        w = std::clamp((H[k] - mass) / dt, 0.0, 1.0);
        stop = true;
      }
      stoch[k] += w * dy;
      if (truth != nullptr) bias[k] += w * dt * ((*truth)(y) - s_at_x[k]);
      if (stop) {
        est.attained[k] = 1;
        est.tau[k] = path.time(i + 1);
        --remaining;
      } else {
        ++active[k];
      }
    });
  }

  est.s_tilde.resize(n);
  for (std::size_t k = 0; k < n; ++k) est.s_tilde[k] = stoch[k] / H[k];
  if (truth != nullptr) {
    est.bias.resize(n);
    for (std::size_t k = 0; k < n; ++k) est.bias[k] = bias[k] / H[k];
  }
  return est;
}

SequentialObservations regression_data(const DiffusionPath& path, const GridSpec& grid,
                                       const Schedule& schedule, const DriftSpec* truth) {
  if (!validate_h1(schedule).pass) throw ArgumentError("regression_data: schedule violates H1");
  if (schedule.n != grid.n) throw ArgumentError("regression_data: schedule n != grid n");

  SequentialObservations obs;
  obs.density.epsT = schedule.epsT;
  obs.density.q_hat = estimate_density(path, schedule.t0, grid);
  obs.density.q_tilde = truncate_density(obs.density.q_hat, schedule.epsT);
  obs.H = thresholds(obs.density.q_tilde, schedule.T, schedule.t0, grid.h, schedule.epsT);
  obs.sigma_sq = variances(obs.density.q_tilde, schedule.T, schedule.t0, grid.n, grid.a, grid.b,
                           schedule.epsT);

  const double bound = variance_bound(grid.a, grid.b, schedule.epsT);
  for (double s : obs.sigma_sq) {
    if (s > bound * (1.0 + 1e-12)) throw InternalError("regression_data: sigma_k^2 exceeds sigma_*");
  }

  auto est = sequential_estimate(path, grid, schedule.t0, schedule.T, obs.H, truth);
  obs.tau = std::move(est.tau);
  obs.s_tilde = std::move(est.s_tilde);
  obs.attained = std::move(est.attained);
  obs.gamma = std::all_of(obs.attained.begin(), obs.attained.end(), [](char c) { return c != 0; });
  obs.Y = obs.gamma ? obs.s_tilde : std::vector<double>(obs.s_tilde.size(), 0.0);
  if (truth != nullptr) obs.B = std::move(est.bias);
  return obs;
}

void write_observations_csv(std::ostream& out, const SequentialObservations& obs,
                            const GridSpec& grid) {
  out << "k,x_k,Y_k,tau_k,H_k,sigma_sq_k,gamma\n";
  for (std::size_t k = 0; k < obs.Y.size(); ++k) {
    out << (k + 1) << ',' << csv::real(grid.points[k]) << ',' << csv::real(obs.Y[k]) << ','
        << csv::real(obs.tau[k]) << ',' << csv::real(obs.H[k]) << ',' << csv::real(obs.sigma_sq[k])
        << ',' << (obs.gamma ? 1 : 0) << '\n';
  }
}

}  // namespace driftforge
