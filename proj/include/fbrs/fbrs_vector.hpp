#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fbrs/dynamics.hpp"
#include "fbrs/error.hpp"
#include "fbrs/quadrature.hpp"
#include "fbrs/radial.hpp"

namespace fbrs {

/// Integration constants of the coefficient functions,
///   u(r) = gamma sin(g(r) + phi) = alpha cos g + beta sin g.
struct FbrsParams {
  double gamma = 1.0;
  double phi = std::numbers::pi / 2.0;

  static FbrsParams make(double gamma, double phi) {
    if (!std::isfinite(gamma) || !std::isfinite(phi)) {
      throw Error(Errc::InvalidParameter, "gamma and phi must be finite");
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double wrapped = std::fmod(phi, two_pi);
    if (wrapped < 0.0) wrapped += two_pi;
    if (wrapped >= two_pi) wrapped = 0.0;
    return {gamma, wrapped};
  }

  static FbrsParams from_alpha_beta(double alpha, double beta) {
    return make(std::hypot(alpha, beta), std::atan2(alpha, beta));
  }

  double alpha() const noexcept { return gamma * std::sin(phi); }
  double beta() const noexcept { return gamma * std::cos(phi); }
};

/// gamma = -e for Kepler orbits (recovers the Laplace-Runge-Lenz coefficients),
/// 1 otherwise.
inline double auto_gamma(const OrbitParams& params) {
  if (params.potential().kind() == PotentialKind::Kepler ||
      (params.potential().kind() == PotentialKind::PowerLaw && params.potential().exponent() == -1.0)) {
    const double L = params.angmom();
    return -std::sqrt(std::max(0.0, 1.0 + 2.0 * L * L * params.energy()));
  }
  return 1.0;
}

struct Coefficients {
  double a = 0.0;
  double b = 0.0;
};

/// u = gamma sin(g + phi)
inline double coefficient_u(double g_value, const FbrsParams& p) { return p.gamma * std::sin(g_value + p.phi); }

/// a = gamma cos(g + phi) / (r sqrt f),  b = a + gamma sin(g + phi) / r.
inline Coefficients coefficients_from_g(double r, double f, double g_value, const FbrsParams& p) {
  Coefficients c;
  c.a = p.gamma * std::cos(g_value + p.phi) / (r * std::sqrt(f));
  c.b = c.a + p.gamma * std::sin(g_value + p.phi) / r;
  return c;
}

inline Coefficients coefficients_ab(const OrbitParams& params, const TurningPoints& tp, double r, const FbrsParams& p,
                                    const QuadratureConfig& cfg = {}) {
  if (!(r >= tp.r_min && r <= tp.r_max)) {
    throw Error(Errc::OutsideRadialRange, "radius " + std::to_string(r) + " outside the radial range");
  }
  const double f = radial_function_f(params, r);
  if (f < 1e-12) throw Error(Errc::ApsidalSingularity, "a(r) diverges at the apsis, f = " + std::to_string(f));
  return coefficients_from_g(r, f, g_of_r(params, tp, r, cfg), p);
}

/// A = (r^2 a / L^2) i L zdot + b z
inline Complex fbrs_vector(Complex z, Complex zdot, const Coefficients& ab, double L) {
  const double r = std::abs(z);
  return (r * r * ab.a / (L * L)) * Complex(0.0, L) * zdot + ab.b * z;
}

/// A_k = (b - a + (-1)^(k+1) i sqrt(f) a) z
inline Complex fbrs_vector_phase_form(Complex z, double f, int k, const Coefficients& ab) {
  if (k < 1) throw Error(Errc::InvalidPhase, "phase index must be >= 1, got " + std::to_string(k));
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;
  return Complex(ab.b - ab.a, sign * std::sqrt(std::max(f, 0.0)) * ab.a) * z;
}

/// A_k = (-1)^(k+1) gamma i exp((-1)^k i phi + 2 n i Phi), n = floor(k / 2).
inline Complex fbrs_closed_form(int k, const FbrsParams& p, double phi_apsidal) {
  if (k < 1) throw Error(Errc::InvalidPhase, "phase index must be >= 1, got " + std::to_string(k));
  const int n = k / 2;
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;
  return sign * p.gamma * Complex(0.0, 1.0) * std::polar(1.0, -sign * p.phi + 2.0 * n * phi_apsidal);
}

/// Kepler only: i L zdot + z / r, conserved, modulus equal to the eccentricity.
inline Complex kepler_lrl_direct(Complex z, Complex zdot, double L) {
  return Complex(0.0, L) * zdot + z / std::abs(z);
}

/// S = L x A, represented as i L A.
inline Complex hamilton_vector(double L, Complex A) { return Complex(0.0, L) * A; }

struct FbrsSample {
  double t = 0.0;
  Complex A;
  int k = 1;
};

struct PhaseConstant {
  int k = 1;
  Complex A;          // componentwise median over the phase
  double spread = 0;  // max |A(t) - A| over the phase
  std::size_t count = 0;
};

struct JumpEvent {
  double t = 0.0;
  ApsisKind apsis = ApsisKind::Apocenter;
  double rotation = 0.0;  // arg(A_after / A_before)
  Complex A_before;
  Complex A_after;
};

struct FbrsTrace {
  FbrsParams params;
  double phi_apsidal = 0.0;
  std::vector<FbrsSample> samples;
  std::vector<PhaseConstant> phases;
  std::vector<JumpEvent> jumps;
};

namespace detail {

inline double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace detail

/// Evaluates A along a trajectory, skipping samples within 1e-3 (r_M - r_m)
/// of an apsis, and reports per-phase constants and the jumps between them.
inline FbrsTrace trace_fbrs(const Trajectory& traj, const FbrsParams& p, const QuadratureConfig& cfg = {}) {
  const OrbitParams& params = traj.params;
  const TurningPoints& tp = traj.turning;
  const double band = 1e-3 * tp.width();
  const double L = params.angmom();

  FbrsTrace out;
  out.params = p;
  out.phi_apsidal = traj.apsidal_angle;

  std::map<int, std::vector<Complex>> by_phase;
  for (const auto& s : traj.samples) {
    if (s.r - tp.r_min <= band || tp.r_max - s.r <= band) continue;
    const Complex A = fbrs_vector(s.z, s.zdot, coefficients_ab(params, tp, s.r, p, cfg), L);
    out.samples.push_back({s.t, A, s.k});
    by_phase[s.k].push_back(A);
  }

  for (const auto& [k, values] : by_phase) {
    std::vector<double> re(values.size());
    std::vector<double> im(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      re[i] = values[i].real();
      im[i] = values[i].imag();
    }
    PhaseConstant pc;
    pc.k = k;
    pc.A = Complex(detail::median(std::move(re)), detail::median(std::move(im)));
    pc.count = values.size();
    for (const auto& v : values) pc.spread = std::max(pc.spread, std::abs(v - pc.A));
    out.phases.push_back(pc);
  }

  for (std::size_t i = 1; i < out.phases.size(); ++i) {
    const PhaseConstant& before = out.phases[i - 1];
    const PhaseConstant& after = out.phases[i];
    if (after.k != before.k + 1) continue;
    if (!(std::abs(after.A - before.A) > 1e-3 * std::abs(before.A))) continue;
    JumpEvent jump;
    jump.A_before = before.A;
    jump.A_after = after.A;
    jump.rotation = std::arg(after.A / before.A);
    for (const auto& ev : traj.events) {
      if (ev.k_before == before.k) {
        jump.t = ev.t;
        jump.apsis = ev.kind;
        break;
      }
    }
    out.jumps.push_back(jump);
  }
  return out;
}

struct PeresResidual {
  double system = 0.0;        // first-order system and its matrix form
  double u_chain = 0.0;       // a = u', b = u' + u / r
  double second_order = 0.0;  // u'' - (log(1/(r sqrt f)))' u' + (1/(r sqrt f))^2 u
  double max() const noexcept { return std::max({system, u_chain, second_order}); }
};

/// Checks that the closed-form coefficients satisfy the coupled first-order
/// system for a(r), b(r) on the given grid, using 5-point central differences.
/// Stencil values of g are built as g(r) plus a short regular quadrature from
/// r, so the differences see no level-switching noise from the main quadrature.
inline PeresResidual verify_peres_system(const OrbitParams& params, const TurningPoints& tp, const FbrsParams& p,
                                         std::span<const double> grid, const QuadratureConfig& cfg = {1e-13, 16}) {
  const double w = tp.width();
  PeresResidual res;
  for (const double r : grid) {
    const double dist = std::min(r - tp.r_min, tp.r_max - r);
    if (!(dist >= 1e-2 * w * (1.0 - 1e-12))) {
      throw Error(Errc::OutsideRadialRange, "grid point " + std::to_string(r) + " too close to an apsis");
    }
    const double h = std::min(1e-3 * w, 1e-2 * dist);
    const double g0 = g_of_r(params, tp, r, cfg);

    std::array<double, 5> a{}, b{}, u{};
    for (int j = -2; j <= 2; ++j) {
      const double rj = r + j * h;
      double gj = g0;
      if (j != 0) {
        auto integrand = [&](double rho) { return 1.0 / (rho * std::sqrt(radial_function_f(params, rho))); };
        gj += integrate_smooth(integrand, r, rj, 1e-14 * std::abs(rj - r), 8).value;
      }
      const auto c = coefficients_from_g(rj, radial_function_f(params, rj), gj, p);
      a[j + 2] = c.a;
      b[j + 2] = c.b;
      u[j + 2] = coefficient_u(gj, p);
    }
    auto d1 = [h](const std::array<double, 5>& v) { return (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h); };
    auto d2 = [h](const std::array<double, 5>& v) {
      return (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h);
    };

    const double f = radial_function_f(params, r);
    const double fp = radial_function_f_derivative(params, r);
    const double a0 = a[2], b0 = b[2], u0 = u[2];
    const double da = d1(a), db = d1(b), du = d1(u), ddu = d2(u);
    const double scale = std::max({std::abs(a0), std::abs(b0), 1.0});

    const double eq1 = da - db + (2.0 * a0 - b0) / r;
    const double eq2 = r * f * da + a0 * (0.5 * r * fp + f - 1.0) + b0;
    const double eq3 = r * f * db + (0.5 * r * fp - f - 1.0) * a0 + (f + 1.0) * b0;
    res.system = std::max({res.system, std::abs(eq1) / scale, std::abs(eq2) / scale, std::abs(eq3) / scale});

    res.u_chain = std::max({res.u_chain, std::abs(a0 - du) / scale, std::abs(b0 - (du + u0 / r)) / scale});

    const double c1 = -1.0 / r - 0.5 * fp / f;  // (log(1/(r sqrt f)))'
    const double c2 = 1.0 / (r * r * f);
    const double terms = std::max({1.0, std::abs(ddu), std::abs(c1 * du), std::abs(c2 * u0)});
    res.second_order = std::max(res.second_order, std::abs(ddu - c1 * du + c2 * u0) / terms);
  }
  return res;
}

/// Symmetric 2x2 tensor.
struct Tensor2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double trace() const noexcept { return xx + yy; }

  static Tensor2 outer(Complex v) { return {v.real() * v.real(), v.real() * v.imag(), v.imag() * v.imag()}; }

  Tensor2& operator+=(const Tensor2& o) {
    xx += o.xx;
    xy += o.xy;
    yy += o.yy;
    return *this;
  }
  friend Tensor2 operator*(double s, const Tensor2& t) { return {s * t.xx, s * t.xy, s * t.yy}; }
};

inline double max_abs_difference(const Tensor2& a, const Tensor2& b) {
  return std::max({std::abs(a.xx - b.xx), std::abs(a.xy - b.xy), std::abs(a.yy - b.yy)});
}

/// T = (1/2) v (x) v + (omega^2 / 2) r (x) r, for the Hooke potential only.
inline Tensor2 fradkin_tensor(const Potential& pot, Complex z, Complex zdot) {
  if (pot.kind() != PotentialKind::Hooke) throw Error(Errc::NotHooke, "the Fradkin tensor needs a Hooke potential");
  const double w2 = pot.omega() * pot.omega();
  Tensor2 t = 0.5 * Tensor2::outer(zdot);
  t += (0.5 * w2) * Tensor2::outer(z);
  return t;
}

/// (omega^2 / 2) A (x) A + (1 / (2 |A|^2)) S (x) S
inline Tensor2 fradkin_reconstruction(Complex A, Complex S, double omega) {
  Tensor2 t = (0.5 * omega * omega) * Tensor2::outer(A);
  t += (0.5 / std::norm(A)) * Tensor2::outer(S);
  return t;
}

/// Reconstruction averaged over the per-phase constants of a Hooke trace.
/// The identity only balances dimensionally with |A| equal to the pericenter
/// distance and |S| = L, so each phase constant is rescaled to that
/// normalization first (its direction is what the trace determines).
inline Tensor2 fradkin_reconstruction_from_trace(const FbrsTrace& trace, const Trajectory& traj) {
  const Potential& pot = traj.params.potential();
  if (pot.kind() != PotentialKind::Hooke) throw Error(Errc::NotHooke, "the Fradkin tensor needs a Hooke potential");
  Tensor2 acc;
  std::size_t used = 0;
  for (const auto& pc : trace.phases) {
    const double mod = std::abs(pc.A);
    if (mod == 0.0) continue;
    const Complex unit = pc.A / mod;
    const Complex A = traj.turning.r_min * unit;
    const Complex S = hamilton_vector(traj.params.angmom(), unit);
    acc += fradkin_reconstruction(A, S, pot.omega());
    ++used;
  }
  if (used == 0) throw Error(Errc::InvalidParameter, "trace has no nonzero phase constants");
  return (1.0 / static_cast<double>(used)) * acc;
}

}  // namespace fbrs
