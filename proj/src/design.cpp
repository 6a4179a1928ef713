#include "driftforge/design.hpp"

#include <algorithm>
#include <cmath>

#include "driftforge/errors.hpp"

namespace driftforge {

GridSpec build_grid(double a, double b, int n) {
  if (!(a < b)) throw ArgumentError("build_grid: need a < b");
  if (n < 2) throw ArgumentError("build_grid: need n >= 2");
  GridSpec g;
  g.a = a;
  g.b = b;
  g.n = n;
  g.h = (b - a) / (2.0 * n);
  g.points.resize(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) g.points[k - 1] = a + (static_cast<double>(k) / n) * (b - a);
  g.points.back() = b;
  return g;
}

int choose_n(double T) {
  if (!(T >= 32.0)) throw ArgumentError("choose_n: T must be >= 32");
  return static_cast<int>(std::floor(T));
}

Schedule schedule_params(double T) {
  if (!(T >= 32.0)) throw ArgumentError("schedule_params: T must be >= 32");
  Schedule s;
  s.T = T;
  const double l = std::log(T);
  s.t0 = std::max(std::min(l * l * l * l, T / 2.0), 16.0);
  s.epsT = std::sqrt(2.0) * std::pow(s.t0, -0.125);
  // At t0 = 16 the formula gives sqrt(2)/sqrt(2); pin it so the H1 upper
  // bound is not lost to rounding.
  s.epsT = std::min(s.epsT, 1.0);
  s.n = choose_n(T);
  if (!validate_h1(s).pass) throw InternalError("schedule_params: H1 violated");
  return s;
}

H1Report validate_h1(const Schedule& s) {
  constexpr double rel = 1e-12;
  H1Report r;
  r.horizon_ok = s.T >= 32.0;
  r.t0_lower_ok = s.t0 >= 16.0;
  r.t0_upper_ok = s.t0 <= s.T / 2.0;
  const double eps_floor = s.t0 > 0.0 ? std::sqrt(2.0) * std::pow(s.t0, -0.125) : INFINITY;
  r.eps_lower_ok = s.epsT >= eps_floor * (1.0 - rel);
  r.eps_upper_ok = s.epsT <= 1.0;
  r.n_ok = s.n >= 1 && s.n <= s.T;
  r.pass = r.horizon_ok && r.t0_lower_ok && r.t0_upper_ok && r.eps_lower_ok && r.eps_upper_ok &&
           r.n_ok;
  return r;
}

}  // namespace driftforge
