#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "fbrs/error.hpp"
#include "fbrs/quadrature.hpp"
#include "fbrs/radial.hpp"

namespace fbrs {

/// Power-law member for exponent p; p = 0 maps to the logarithmic potential.
inline Potential potential_for_exponent(double p) {
  if (std::abs(p) < 1e-12) return Potential::logarithmic();
  return Potential::power_law(p);
}

struct BertrandCell {
  double p = 0.0;
  double level = 0.0;  // pericenter depth: r_min = r_c (1 - level)
  double energy = 0.0;
  double angmom = 1.0;
  double eccentricity = 0.0;  // (r_max - r_min) / (r_max + r_min)
  double phi = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

/// Orbit whose pericenter sits at r_c (1 - level) for the given potential.
inline OrbitParams orbit_at_depth(const Potential& pot, double angmom, double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(Errc::InvalidParameter, "depth level must lie in (0, 1)");
  const OrbitParams probe(pot, 0.0, angmom);
  const double rc = find_circular_radius(probe);
  return OrbitParams(pot, effective_potential(probe, rc * (1.0 - level)), angmom);
}

inline BertrandCell bertrand_cell(double p, double level, double angmom, const QuadratureConfig& cfg = {}) {
  BertrandCell cell;
  cell.p = p;
  cell.level = level;
  cell.angmom = angmom;
  try {
    const OrbitParams params = orbit_at_depth(potential_for_exponent(p), angmom, level);
    cell.energy = params.energy();
    const TurningPoints tp = find_turning_points(params);
    cell.eccentricity = tp.width() / (tp.r_max + tp.r_min);
    cell.phi = apsidal_angle(params, tp, cfg).phi;
  } catch (const Error& e) {
    cell.error = e.what();
  }
  return cell;
}

/// Evaluates every (exponent, level) cell, spreading cells over worker
/// threads. Output order is exponent-major and independent of scheduling.
inline std::vector<BertrandCell> bertrand_sweep(std::span<const double> exponents, std::span<const double> levels,
                                                double angmom, const QuadratureConfig& cfg = {},
                                                unsigned workers = std::thread::hardware_concurrency()) {
  const std::size_t n = exponents.size() * levels.size();
  std::vector<BertrandCell> cells(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      cells[i] = bertrand_cell(exponents[i / levels.size()], levels[i % levels.size()], angmom, cfg);
    }
  };
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(std::max<std::size_t>(n, 1)));
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  return cells;
}

/// Evenly spaced exponents on [p_min, p_max].
inline std::vector<double> exponent_grid(double p_min, double p_max, int steps) {
  if (steps < 1) throw Error(Errc::InvalidParameter, "steps must be >= 1");
  std::vector<double> grid;
  if (steps == 1) return {p_min};
  for (int i = 0; i < steps; ++i) grid.push_back(p_min + (p_max - p_min) * i / (steps - 1));
  return grid;
}

/// Apsidal angle of the circular limit, by Richardson extrapolation of the
/// quadrature at energies eps, eps/2, eps/4 above the bottom of the well
/// (Phi is analytic in E - min V_L).
inline double near_circular_apsidal_angle(const Potential& pot, double angmom, double rel_depth = 1e-4,
                                          const QuadratureConfig& cfg = {1e-13, 16}) {
  const OrbitParams probe(pot, 0.0, angmom);
  const double rc = find_circular_radius(probe);
  const double vmin = effective_potential(probe, rc);
  const double curvature = pot.second_derivative(rc) + 3.0 * angmom * angmom / (rc * rc * rc * rc);
  const double eps = rel_depth * curvature * rc * rc;
  auto phi_at = [&](double de) { return apsidal_angle(OrbitParams(pot, vmin + de, angmom), cfg).phi; };
  const double p1 = phi_at(eps);
  const double p2 = phi_at(0.5 * eps);
  const double p4 = phi_at(0.25 * eps);
  return (8.0 * p4 - 6.0 * p2 + p1) / 3.0;
}

}  // namespace fbrs
