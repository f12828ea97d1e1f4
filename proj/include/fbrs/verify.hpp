#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fbrs/dynamics.hpp"
#include "fbrs/fbrs_vector.hpp"
#include "fbrs/quadrature.hpp"
#include "fbrs/radial.hpp"

namespace fbrs {

struct CheckResult {
  std::string name;
  double value = 0.0;      // measured deviation
  double threshold = 0.0;  // pass when value <= threshold
  bool passed = false;
};

struct VerifyOptions {
  int n_periods = 3;
  double step_tol = 1e-12;
  QuadratureConfig quadrature{};
  FbrsParams fbrs{};
  int peres_points = 50;
};

/// Wraps x into (-pi, pi].
inline double wrap_angle(double x) {
  const double two_pi = 2.0 * std::numbers::pi;
  x = std::remainder(x, two_pi);
  return x <= -std::numbers::pi ? x + two_pi : x;
}

/// Evenly spaced radii strictly inside [r_min, r_max], at least 2% of the
/// width away from either apsis.
inline std::vector<double> interior_grid(const TurningPoints& tp, int points) {
  std::vector<double> grid;
  const double lo = tp.r_min + 0.02 * tp.width();
  const double hi = tp.r_max - 0.02 * tp.width();
  for (int i = 0; i < points; ++i) grid.push_back(points == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (points - 1));
  return grid;
}

/// Runs the invariant checks on one orbit: conservation, branch
/// reconstruction, piecewise constancy, jump law, closed-form phase constants,
/// agreement of the two assembly forms and the Peres residual. Kepler and
/// Hooke orbits get their extra identities.
inline std::vector<CheckResult> verify_orbit(const OrbitParams& params, const VerifyOptions& opt = {}) {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, double value, double threshold) {
    out.push_back({std::move(name), value, threshold, value <= threshold});
  };

  IntegrationOptions io;
  io.step_tol = opt.step_tol;
  io.quadrature = opt.quadrature;
  const Trajectory traj = integrate_orbit(params, opt.n_periods, io);
  const TurningPoints& tp = traj.turning;
  const double phi = traj.apsidal_angle;
  const double L = params.angmom();

  add("energy_drift", traj.conservation.max_rel_energy_drift, 1e-9);
  add("angmom_drift", traj.conservation.max_rel_angmom_drift, 1e-9);
  add("apsis_event_count", std::abs(static_cast<double>(traj.events.size()) - 2.0 * opt.n_periods), 0.0);

  double branch = 0.0;
  const double band = 1e-3 * tp.width();
  for (const auto& s : traj.samples) {
    if (s.r - tp.r_min <= band || tp.r_max - s.r <= band) continue;
    const double predicted = theta_branch(s.k, phi, g_of_r(params, tp, s.r, opt.quadrature)) + traj.theta_offset();
    branch = std::max(branch, std::abs(wrap_angle(s.theta - predicted)));
  }
  add("branch_reconstruction", branch, 1e-6);

  const FbrsTrace trace = trace_fbrs(traj, opt.fbrs, opt.quadrature);
  double spread = 0.0;
  double closed = 0.0;
  const Complex orientation = std::polar(1.0, traj.theta_offset());
  for (const auto& pc : trace.phases) {
    spread = std::max(spread, pc.spread);
    closed = std::max(closed, std::abs(pc.A - orientation * fbrs_closed_form(pc.k, opt.fbrs, phi)));
  }
  add("piecewise_constancy", spread, 1e-6);
  add("closed_form_phase_constants", closed, 1e-6);

  const bool degenerate = std::abs(std::polar(1.0, 2.0 * phi) - 1.0) < 1e-6;
  const double expected_jumps = degenerate ? 0.0 : static_cast<double>(opt.n_periods);
  add("jump_count", std::abs(static_cast<double>(trace.jumps.size()) - expected_jumps), 0.0);
  double rotation = 0.0;
  double modulus = 0.0;
  for (const auto& j : trace.jumps) {
    rotation = std::max(rotation, std::abs(wrap_angle(j.rotation - 2.0 * phi)));
    modulus = std::max(modulus, std::abs(std::abs(j.A_after) - std::abs(j.A_before)));
  }
  add("jump_rotation", rotation, 1e-5);
  add("jump_modulus", modulus, 1e-8);

  double two_form = 0.0;
  for (const auto& s : traj.samples) {
    if (s.r - tp.r_min <= band || tp.r_max - s.r <= band) continue;
    // Compared on the energy shell through the sample, so integration error in
    // the velocity does not enter an algebraic identity.
    const double f = radial_function_f(params, s.r);
    const Complex zdot = (L / s.r) * Complex((s.k % 2 == 1 ? 1.0 : -1.0) * std::sqrt(f), 1.0) * (s.z / s.r);
    const auto ab = coefficients_ab(params, tp, s.r, opt.fbrs, opt.quadrature);
    const Complex direct = fbrs_vector(s.z, zdot, ab, L);
    const Complex phase = fbrs_vector_phase_form(s.z, f, s.k, ab);
    two_form = std::max(two_form, std::abs(direct - phase));
  }
  add("two_form_agreement", two_form, 1e-10);

  const auto grid = interior_grid(tp, opt.peres_points);
  add("peres_residual", verify_peres_system(params, tp, opt.fbrs, grid).max(), 1e-6);

  const Potential& pot = params.potential();
  if (pot.kind() == PotentialKind::Kepler && opt.fbrs.gamma != 0.0 && std::abs(opt.fbrs.phi - std::numbers::pi / 2) < 1e-15) {
    double lrl = 0.0;
    std::size_t i = 0;
    for (const auto& s : traj.samples) {
      if (s.r - tp.r_min <= band || tp.r_max - s.r <= band) continue;
      const Complex scaled = trace.samples[i++].A * (-1.0 / opt.fbrs.gamma) * std::abs(auto_gamma(params));
      lrl = std::max(lrl, std::abs(scaled - kepler_lrl_direct(s.z, s.zdot, L)));
    }
    add("kepler_lrl_identity", lrl, 1e-8);
  }
  if (pot.kind() == PotentialKind::Hooke) {
    const Tensor2 t0 = fradkin_tensor(pot, traj.samples.front().z, traj.samples.front().zdot);
    double drift = 0.0;
    double trace_err = 0.0;
    for (const auto& s : traj.samples) {
      const Tensor2 t = fradkin_tensor(pot, s.z, s.zdot);
      drift = std::max(drift, max_abs_difference(t, t0));
      trace_err = std::max(trace_err, std::abs(t.trace() - params.energy()));
    }
    add("fradkin_invariance", drift, 1e-9);
    add("fradkin_trace_energy", trace_err, 1e-9);
    add("fradkin_reconstruction", max_abs_difference(fradkin_reconstruction_from_trace(trace, traj), t0), 1e-8);
  }
  return out;
}

}  // namespace fbrs
