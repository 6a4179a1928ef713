#pragma once

#include <vector>

namespace driftforge {

// Uniform grid x_k = a + (k/n)(b - a), k = 1..n, with kernel half-width
// h = (b - a)/(2n). Window k is [x_k - h, x_k + h].
struct GridSpec {
  double a = 0.0;
  double b = 1.0;
  int n = 2;
  std::vector<double> points;
  double h = 0.0;

  double length() const { return b - a; }
  double spacing() const { return (b - a) / n; }
};

GridSpec build_grid(double a, double b, int n);

// n(T) = floor(T); requires T >= 32.
int choose_n(double T);

struct Schedule {
  double T = 0.0;
  double t0 = 0.0;
  double epsT = 0.0;
  int n = 0;
};

// t0 = max(min(ln^4 T, T/2), 16), epsT = sqrt(2) t0^(-1/8), n = choose_n(T).
Schedule schedule_params(double T);

struct H1Report {
  bool horizon_ok = false;   // T >= 32
  bool t0_lower_ok = false;  // 16 <= t0
  bool t0_upper_ok = false;  // t0 <= T/2
  bool eps_lower_ok = false; // sqrt(2)/t0^(1/8) <= epsT
  bool eps_upper_ok = false; // epsT <= 1
  bool n_ok = false;         // n <= T
  bool pass = false;
};

H1Report validate_h1(const Schedule& s);

}  // namespace driftforge
