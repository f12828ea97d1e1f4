#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "fbrs/error.hpp"
#include "fbrs/ode.hpp"
#include "fbrs/quadrature.hpp"
#include "fbrs/radial.hpp"

namespace fbrs {

using Complex = std::complex<double>;

struct TrajectorySample {
  double t = 0.0;
  Complex z;
  Complex zdot;
  double r = 0.0;
  double theta = 0.0;  // unwound, continuous
  int k = 1;           // phase index: odd while r increases, even while it decreases
};

enum class ApsisKind { Pericenter, Apocenter };

constexpr std::string_view to_string(ApsisKind kind) noexcept {
  return kind == ApsisKind::Pericenter ? "pericenter" : "apocenter";
}

struct ApsisEvent {
  double t = 0.0;
  ApsisKind kind = ApsisKind::Pericenter;
  double r_at_event = 0.0;
  int k_before = 1;
  int k_after = 2;
};

struct ConservationRecord {
  double max_rel_energy_drift = 0.0;
  double max_rel_angmom_drift = 0.0;
};

struct IntegrationOptions {
  double step_tol = 1e-12;
  bool start_at_apocenter = false;
  int samples_per_turn = 200;
  QuadratureConfig quadrature{};
  RootConfig roots{};
};

struct Trajectory {
  OrbitParams params;
  TurningPoints turning;
  double apsidal_angle = 0.0;
  double radial_period = 0.0;
  double t_end = 0.0;
  bool started_at_apocenter = false;
  std::vector<TrajectorySample> samples;
  std::vector<ApsisEvent> events;
  ConservationRecord conservation;

  /// Constant to add to the branch formula so it matches the unwound angle;
  /// nonzero only for an apocenter start, where theta(0) = 0 sits on branch 2.
  double theta_offset() const noexcept { return started_at_apocenter ? -apsidal_angle : 0.0; }
};

/// theta_k(r) = 2 n Phi + (-1)^(k+1) g(r), n = floor(k / 2).
inline double theta_branch(int k, double phi_apsidal, double g_value) {
  if (k < 1) throw Error(Errc::InvalidPhase, "phase index must be >= 1, got " + std::to_string(k));
  const int n = k / 2;
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;
  return 2.0 * n * phi_apsidal + sign * g_value;
}

/// Closed-form velocity in phase k,
///   zdot = (L / r) ((-1)^(k+1) sqrt(f) + i) exp(i theta_k(r)).
inline Complex velocity_from_radius(const OrbitParams& params, const TurningPoints& tp, double r, int k,
                                    double phi_apsidal, const QuadratureConfig& cfg = {}) {
  if (k < 1) throw Error(Errc::InvalidPhase, "phase index must be >= 1, got " + std::to_string(k));
  if (!(r >= tp.r_min && r <= tp.r_max)) {
    throw Error(Errc::OutsideRadialRange, "radius " + std::to_string(r) + " outside the radial range");
  }
  const double theta = theta_branch(k, phi_apsidal, g_of_r(params, tp, r, cfg));
  const double root_f = std::sqrt(std::max(0.0, radial_function_f(params, r)));
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;
  return (params.angmom() / r) * Complex(sign * root_f, 1.0) * std::polar(1.0, theta);
}

namespace detail {

/// Safeguarded Newton on [lo, hi] where value(lo) and value(hi) bracket a root.
/// eval(t) returns {value, derivative}.
template <class Eval>
double bracketed_newton(Eval&& eval, double lo, double hi, double tol) {
  double v_lo = eval(lo).first;
  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const auto [v, dv] = eval(t);
    if (v == 0.0) return t;
    if ((v < 0.0) == (v_lo < 0.0)) {
      lo = t;
      v_lo = v;
    } else {
      hi = t;
    }
    double next = dv != 0.0 ? t - v / dv : 0.5 * (lo + hi);
    if (!(next > std::min(lo, hi) && next < std::max(lo, hi))) next = 0.5 * (lo + hi);
    const double step = std::abs(next - t);
    t = next;
    if (step <= tol || std::abs(hi - lo) <= tol) break;
  }
  return t;
}

}  // namespace detail

/// Integrates z'' + (z / r) U'(r) = 0 from the pericenter (or apocenter) for
/// n_periods radial periods, recording apsis events, phase indices and
/// samples at every accepted step plus every Delta-theta of swept angle.
inline Trajectory integrate_orbit(const OrbitParams& params, int n_periods, const IntegrationOptions& opts = {}) {
  if (n_periods < 1) throw Error(Errc::InvalidParameter, "n_periods must be >= 1");
  if (!(opts.step_tol > 0.0)) throw Error(Errc::InvalidParameter, "step_tol must be positive");
  if (opts.samples_per_turn < 1) throw Error(Errc::InvalidParameter, "samples_per_turn must be >= 1");

  const TurningPoints tp = find_turning_points(params, opts.roots);
  const double phi = apsidal_angle(params, tp, opts.quadrature).phi;
  const double period = radial_period(params, tp, opts.quadrature);
  const double L = params.angmom();
  const Potential pot = params.potential();

  Trajectory traj{params, tp, phi, period, n_periods * period, opts.start_at_apocenter, {}, {}, {}};

  using State = ode::State<4>;
  auto rhs = [pot](double, const State& y) {
    const double r = std::hypot(y[0], y[1]);
    const double accel = pot.derivative(r) / r;
    return State{y[2], y[3], -accel * y[0], -accel * y[1]};
  };
  ode::AdaptiveDop853<4, decltype(rhs)> stepper(rhs, opts.step_tol, opts.step_tol, period / 16.0);

  const double r0 = opts.start_at_apocenter ? tp.r_max : tp.r_min;
  stepper.initialize(0.0, State{r0, 0.0, 0.0, L / r0});

  const double t_end = traj.t_end;
  const double t_stop = t_end + 0.02 * period;
  const double dtheta = std::min(2.0 * std::numbers::pi, 2.0 * phi) / opts.samples_per_turn;
  const double time_tol = 1e-13 * period;
  const double apsis_band = 1e-3 * tp.width();
  const double E = params.energy();
  const double energy_scale = E != 0.0 ? std::abs(E) : 1.0;

  int k = opts.start_at_apocenter ? 2 : 1;
  double theta_start = 0.0;  // unwound angle at the start of the current step
  long next_grid = 1;

  auto make_sample = [&](double t, const State& y, const State& y_ref, double theta_ref, int phase) {
    TrajectorySample s;
    s.t = t;
    s.z = Complex(y[0], y[1]);
    s.zdot = Complex(y[2], y[3]);
    s.r = std::abs(s.z);
    s.theta = theta_ref + std::arg(s.z / Complex(y_ref[0], y_ref[1]));
    s.k = phase;
    return s;
  };
  auto record = [&](const TrajectorySample& s) {
    if (!traj.samples.empty() && s.t <= traj.samples.back().t) return;
    const double energy = 0.5 * std::norm(s.zdot) + pot.value(s.r);
    const double angmom = std::imag(std::conj(s.z) * s.zdot);
    traj.conservation.max_rel_energy_drift =
        std::max(traj.conservation.max_rel_energy_drift, std::abs(energy - E) / energy_scale);
    traj.conservation.max_rel_angmom_drift =
        std::max(traj.conservation.max_rel_angmom_drift, std::abs(angmom - L) / L);
    traj.samples.push_back(s);
  };
  auto radial_rate = [](const State& y) { return y[0] * y[2] + y[1] * y[3]; };

  record(make_sample(0.0, stepper.y(), stepper.y(), 0.0, k));

  while (stepper.t() < t_stop) {
    stepper.advance(t_stop);
    const double t0 = stepper.t_prev();
    const double t1 = stepper.t();
    const State y0 = stepper.y_prev();
    const State y1 = stepper.y();

    // Apsis: Re(conj(z) zdot) = r rdot changes sign against the current phase.
    double t_event = t1 + 1.0;
    const double s1 = radial_rate(y1);
    if ((k % 2 == 1 && s1 < 0.0) || (k % 2 == 0 && s1 > 0.0)) {
      auto eval = [&](double tau) {
        const State y = stepper.state_at(tau);
        const State d = stepper.derivative(tau, y);
        return std::pair{radial_rate(y), y[2] * y[2] + y[3] * y[3] + y[0] * d[2] + y[1] * d[3]};
      };
      t_event = detail::bracketed_newton(eval, t0, t1, time_tol);
      const State ye = stepper.state_at(t_event);
      const double re = std::hypot(ye[0], ye[1]);
      ApsisEvent ev;
      ev.t = t_event;
      ev.r_at_event = re;
      ev.k_before = k;
      ev.k_after = k + 1;
      if (std::abs(re - tp.r_max) <= apsis_band) {
        ev.kind = ApsisKind::Apocenter;
      } else if (std::abs(re - tp.r_min) <= apsis_band) {
        ev.kind = ApsisKind::Pericenter;
      } else {
        throw Error(Errc::AmbiguousApsis, "apsis at r = " + std::to_string(re) + " matches neither turning point");
      }
      traj.events.push_back(ev);
    }
    const int k_new = t_event <= t1 ? k + 1 : k;
    auto phase_at = [&](double t) { return t < t_event ? k : k_new; };

    const double theta_end = theta_start + std::arg(Complex(y1[0], y1[1]) / Complex(y0[0], y0[1]));

    // Uniform-angle samples inside the step.
    while (next_grid * dtheta <= theta_end) {
      const double target = next_grid * dtheta;
      auto eval = [&](double tau) {
        const State y = stepper.state_at(tau);
        const double ang = theta_start + std::arg(Complex(y[0], y[1]) / Complex(y0[0], y0[1]));
        return std::pair{ang - target, (y[0] * y[3] - y[1] * y[2]) / (y[0] * y[0] + y[1] * y[1])};
      };
      const double tau = detail::bracketed_newton(eval, t0, t1, time_tol);
      if (tau < t_end) record(make_sample(tau, stepper.state_at(tau), y0, theta_start, phase_at(tau)));
      ++next_grid;
    }
    if (t0 < t_end && t1 >= t_end) {
      record(make_sample(t_end, stepper.state_at(t_end), y0, theta_start, phase_at(t_end)));
    } else if (t1 < t_end) {
      record(make_sample(t1, y1, y0, theta_start, phase_at(t1)));
    }

    k = k_new;
    theta_start = theta_end;
  }
  return traj;
}

}  // namespace fbrs
