#pragma once

// Reference computations for the tests, written independently of the library
// numerics: a fixed-step classical RK4 integrator and direct formulas.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using State = std::array<double, 4>;  // x, y, vx, vy
using Accel = std::function<double(double)>;  // U'(r)

inline State rk4_step(const State& y, double h, const Accel& dU) {
  auto rhs = [&](const State& s) {
    const double r = std::hypot(s[0], s[1]);
    const double a = dU(r) / r;
    return State{s[2], s[3], -a * s[0], -a * s[1]};
  };
  auto axpy = [](const State& s, double c, const State& k) {
    return State{s[0] + c * k[0], s[1] + c * k[1], s[2] + c * k[2], s[3] + c * k[3]};
  };
  const State k1 = rhs(y);
  const State k2 = rhs(axpy(y, 0.5 * h, k1));
  const State k3 = rhs(axpy(y, 0.5 * h, k2));
  const State k4 = rhs(axpy(y, h, k3));
  State out;
  for (int i = 0; i < 4; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

inline double radial_rate(const State& s) { return s[0] * s[2] + s[1] * s[3]; }

/// Times at which r r' crosses from negative to positive (pericenter
/// passages), starting from (r0, 0) with velocity (0, L / r0). Each crossing
/// is refined by bisection on a single RK4 sub-step from the step start.
inline std::vector<double> pericenter_times(const Accel& dU, double r0, double L, double h, int count) {
  State y{r0, 0.0, 0.0, L / r0};
  double t = 0.0;
  std::vector<double> out;
  // Leave the starting pericenter before looking for crossings.
  for (int i = 0; i < 10; ++i) {
    y = rk4_step(y, h, dU);
    t += h;
  }
  while (static_cast<int>(out.size()) < count) {
    const State next = rk4_step(y, h, dU);
    if (radial_rate(y) < 0.0 && radial_rate(next) >= 0.0) {
      double lo = 0.0, hi = h;
      for (int k = 0; k < 80; ++k) {
        const double mid = 0.5 * (lo + hi);
        (radial_rate(rk4_step(y, mid, dU)) < 0.0 ? lo : hi) = mid;
      }
      out.push_back(t + 0.5 * (lo + hi));
    }
    y = next;
    t += h;
  }
  return out;
}

}  // namespace oracle
