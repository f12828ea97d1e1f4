#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "fbrs/error.hpp"
#include "fbrs/potential.hpp"

namespace fbrs {

/// Conserved inputs of a planar orbit at unit mass. A negative angular
/// momentum is mirrored to |L| and remembered in reflected().
class OrbitParams {
 public:
  OrbitParams(Potential potential, double energy, double angmom)
      : potential_(potential), energy_(energy), angmom_(std::abs(angmom)), reflected_(angmom < 0.0) {
    if (!std::isfinite(energy)) throw Error(Errc::InvalidParameter, "energy must be finite");
    if (!std::isfinite(angmom) || angmom == 0.0) {
      throw Error(Errc::InvalidParameter, "angular momentum must be finite and nonzero");
    }
  }

  const Potential& potential() const noexcept { return potential_; }
  double energy() const noexcept { return energy_; }
  double angmom() const noexcept { return angmom_; }
  bool reflected() const noexcept { return reflected_; }

 private:
  Potential potential_;
  double energy_;
  double angmom_;
  bool reflected_;
};

/// Tolerances of the turning-point search.
struct RootConfig {
  double rel_tol = 4 * std::numeric_limits<double>::epsilon();
  double degeneracy_gate = 1e-9;   // r_M - r_m below this times r_c is circular
  double simple_root_gate = 1e-10; // |V_L'| at a root below this is a double root
  double circular_tol = 1e-13;     // |E - min V_L| relative band classified circular
};

struct TurningPoints {
  double r_min = 0.0;
  double r_max = 0.0;
  double dVL_at_rmin = 0.0;
  double dVL_at_rmax = 0.0;

  double width() const noexcept { return r_max - r_min; }
};

enum class OrbitClass { Bounded, Circular, Unbounded, Forbidden };

constexpr std::string_view to_string(OrbitClass c) noexcept {
  switch (c) {
    case OrbitClass::Bounded: return "bounded";
    case OrbitClass::Circular: return "circular";
    case OrbitClass::Unbounded: return "unbounded";
    case OrbitClass::Forbidden: return "forbidden";
  }
  return "unknown";
}

/// V_L(r) = U(r) + L^2 / (2 r^2)
inline double effective_potential(const OrbitParams& params, double r) {
  const double L = params.angmom();
  return params.potential().value(r) + 0.5 * L * L / (r * r);
}

inline double effective_potential_derivative(const OrbitParams& params, double r) {
  const double L = params.angmom();
  return params.potential().derivative(r) - L * L / (r * r * r);
}

/// (V_L(b) - V_L(a)) / (b - a) without cancellation.
inline double effective_potential_divided_difference(const OrbitParams& params, double a, double b) {
  const double L = params.angmom();
  return params.potential().divided_difference(a, b) - 0.5 * L * L * (a + b) / (a * a * b * b);
}

/// f(r) = (2 r^2 / L^2)(E - V_L(r)); positive strictly between the apsides.
inline double radial_function_f(const OrbitParams& params, double r) {
  const double L = params.angmom();
  return 2.0 * r * r / (L * L) * (params.energy() - effective_potential(params, r));
}

inline double radial_function_f_derivative(const OrbitParams& params, double r) {
  const double L = params.angmom();
  const double gap = params.energy() - effective_potential(params, r);
  return (4.0 * r * gap - 2.0 * r * r * effective_potential_derivative(params, r)) / (L * L);
}

/// Radius of the circular orbit, V_L'(r_c) = 0, found by scanning a log grid
/// on [1e-6, 1e6] for the first -/+ sign change and bisecting.
inline double find_circular_radius(const OrbitParams& params) {
  constexpr double kLo = 1e-6;
  constexpr int kPerDecade = 16;
  constexpr int kPoints = 12 * kPerDecade + 1;
  auto dV = [&](double r) { return effective_potential_derivative(params, r); };

  double lo = 0.0;
  double hi = 0.0;
  double prev_r = kLo;
  double prev_d = dV(prev_r);
  for (int i = 1; i < kPoints; ++i) {
    const double r = kLo * std::pow(10.0, static_cast<double>(i) / kPerDecade);
    const double d = dV(r);
    if (prev_d < 0.0 && d >= 0.0) {
      lo = prev_r;
      hi = r;
      break;
    }
    prev_r = r;
    prev_d = d;
  }
  if (hi == 0.0) throw Error(Errc::NoMinimumFound, "no minimum of the effective potential in [1e-6, 1e6]");

  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (dV(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

inline OrbitClass classify_orbit(const OrbitParams& params, const RootConfig& cfg = {}) {
  const double E = params.energy();
  if (E >= params.potential().asymptote()) return OrbitClass::Unbounded;
  const double rc = find_circular_radius(params);
  const double vmin = effective_potential(params, rc);
  const double band = cfg.circular_tol * std::max(1.0, std::abs(vmin));
  if (E < vmin - band) return OrbitClass::Forbidden;
  if (E <= vmin + band) return OrbitClass::Circular;
  return OrbitClass::Bounded;
}

namespace detail {

/// Bisection on a bracket with f(neg) < 0 < f(pos).
template <class Fn>
double bisect_root(Fn&& f, double neg, double pos, double rel_tol) {
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (neg + pos);
    if (mid == neg || mid == pos) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (fm < 0.0) {
      neg = mid;
    } else {
      pos = mid;
    }
    if (std::abs(pos - neg) <= rel_tol * std::abs(mid)) break;
  }
  return 0.5 * (neg + pos);
}

}  // namespace detail

/// Pericenter and apocenter radii of a bounded orbit, with the simple-root
/// certificates V_L'(r_min) < 0 < V_L'(r_max).
inline TurningPoints find_turning_points(const OrbitParams& params, const RootConfig& cfg = {}) {
  const OrbitClass cls = classify_orbit(params, cfg);
  if (cls == OrbitClass::Circular) throw Error(Errc::CircularDegenerate, "energy sits at the minimum of V_L");
  if (cls != OrbitClass::Bounded) {
    throw Error(Errc::NotBounded, "orbit is " + std::string(to_string(cls)));
  }

  const double rc = find_circular_radius(params);
  auto f = [&](double r) { return radial_function_f(params, r); };
  if (!(f(rc) > 0.0)) throw Error(Errc::CircularDegenerate, "f(r_c) is not positive");

  double inner = rc;
  for (int i = 0; i < 2100 && f(inner) >= 0.0; ++i) inner *= 0.5;
  double outer = rc;
  for (int i = 0; i < 200 && f(outer) >= 0.0; ++i) outer *= 2.0;
  if (f(inner) >= 0.0 || f(outer) >= 0.0) throw Error(Errc::NotBounded, "could not bracket the turning points");

  TurningPoints tp;
  tp.r_min = detail::bisect_root(f, inner, rc, cfg.rel_tol);
  tp.r_max = detail::bisect_root(f, outer, rc, cfg.rel_tol);
  tp.dVL_at_rmin = effective_potential_derivative(params, tp.r_min);
  tp.dVL_at_rmax = effective_potential_derivative(params, tp.r_max);

  if (tp.width() < cfg.degeneracy_gate * rc) {
    throw Error(Errc::CircularDegenerate, "turning points coincide within the degeneracy gate");
  }
  if (std::abs(tp.dVL_at_rmin) < cfg.simple_root_gate || std::abs(tp.dVL_at_rmax) < cfg.simple_root_gate) {
    throw Error(Errc::CircularDegenerate, "turning point is not a simple root");
  }
  if (!(tp.dVL_at_rmin < 0.0) || !(tp.dVL_at_rmax > 0.0)) {
    throw Error(Errc::NotBounded, "turning points fail the simple-root sign certificates");
  }
  return tp;
}

}  // namespace fbrs
