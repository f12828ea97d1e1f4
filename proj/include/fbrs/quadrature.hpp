#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "fbrs/error.hpp"
#include "fbrs/radial.hpp"

namespace fbrs {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  int max_levels = 12;
};

struct QuadratureResult {
  double value = 0.0;
  double err_estimate = 0.0;
  std::size_t evaluations = 0;

  QuadratureResult& operator+=(const QuadratureResult& other) {
    value += other.value;
    err_estimate += other.err_estimate;
    evaluations += other.evaluations;
    return *this;
  }
};

struct ApsidalResult {
  double phi = 0.0;
  double err_estimate = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

template <int N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    for (int i = 0; i < N; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 1.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= N; ++k) {
          const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

inline const GaussLegendre<10>& gauss_legendre_10() {
  static const GaussLegendre<10> rule;
  return rule;
}

}  // namespace detail

/// Composite 10-point Gauss-Legendre on 1, 2, 4, ... panels until two
/// successive levels differ by at most abs_tol. The integrand must be smooth.
template <class Fn>
QuadratureResult integrate_smooth(Fn&& fn, double a, double b, double abs_tol, int max_levels) {
  const auto& rule = detail::gauss_legendre_10();
  QuadratureResult out;
  if (a == b) return out;

  double previous = 0.0;
  for (int level = 0; level < max_levels; ++level) {
    const long panels = 1L << level;
    const double width = (b - a) / static_cast<double>(panels);
    double sum = 0.0;
    for (long p = 0; p < panels; ++p) {
      const double center = a + (static_cast<double>(p) + 0.5) * width;
      double panel = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        panel += rule.weights[i] * fn(center + 0.5 * width * rule.nodes[i]);
      }
      sum += 0.5 * width * panel;
    }
    out.evaluations += static_cast<std::size_t>(panels) * rule.nodes.size();
    if (level > 0) {
      const double diff = std::abs(sum - previous);
      if (diff <= abs_tol) {
        out.value = sum;
        out.err_estimate = diff;
        return out;
      }
    }
    previous = sum;
  }
  throw Error(Errc::ToleranceNotReached,
              "quadrature did not reach " + std::to_string(abs_tol) + " within " + std::to_string(max_levels) +
                  " levels");
}

/// Radial profile of an orbit in the factored form used by the endpoint
/// substitutions:
///   f(rho) = (rho - r_min) * lower_quotient(rho) = (r_max - rho) * upper_quotient(rho).
/// Both quotients are evaluated through divided differences of V_L, so they
/// stay accurate as rho approaches the turning point they divide out.
class OrbitProfile {
 public:
  OrbitProfile(const OrbitParams& params, const TurningPoints& tp) : params_(params), tp_(tp) {}

  double r_min() const noexcept { return tp_.r_min; }
  double r_max() const noexcept { return tp_.r_max; }

  double lower_quotient(double rho) const {
    const double L = params_.angmom();
    return -2.0 * rho * rho / (L * L) * effective_potential_divided_difference(params_, tp_.r_min, rho);
  }

  double upper_quotient(double rho) const {
    const double L = params_.angmom();
    return 2.0 * rho * rho / (L * L) * effective_potential_divided_difference(params_, rho, tp_.r_max);
  }

 private:
  OrbitParams params_;
  TurningPoints tp_;
};

/// Integral of weight(rho) / sqrt(f(rho)) from r_min to r. The range is split
/// at the midpoint; rho = r_min + s^2 on the lower half and rho = r_max - s^2
/// on the upper half turn the inverse-square-root endpoint singularities into
/// smooth integrands in s.
template <class Profile, class Weight>
QuadratureResult inverse_sqrt_integral(const Profile& profile, Weight&& weight, double r,
                                       const QuadratureConfig& cfg) {
  const double lo = profile.r_min();
  const double hi = profile.r_max();
  if (!(r >= lo && r <= hi)) {
    throw Error(Errc::OutsideRadialRange, "radius " + std::to_string(r) + " outside [" + std::to_string(lo) + ", " +
                                              std::to_string(hi) + "]");
  }
  if (!(cfg.abs_tol > 0.0)) throw Error(Errc::InvalidParameter, "quadrature abs_tol must be positive");

  auto clamp_sqrt = [](double q) { return std::sqrt(std::max(q, 0.0)); };
  auto lower = [&](double s) {
    const double rho = lo + s * s;
    return 2.0 * weight(rho) / clamp_sqrt(profile.lower_quotient(rho));
  };
  auto upper = [&](double s) {
    const double rho = hi - s * s;
    return 2.0 * weight(rho) / clamp_sqrt(profile.upper_quotient(rho));
  };

  const double mid = 0.5 * (lo + hi);
  const double piece_tol = 0.5 * cfg.abs_tol;
  QuadratureResult out;
  if (r == lo) return out;
  if (r <= mid) {
    out += integrate_smooth(lower, 0.0, std::sqrt(r - lo), piece_tol, cfg.max_levels);
    return out;
  }
  out += integrate_smooth(lower, 0.0, std::sqrt(mid - lo), piece_tol, cfg.max_levels);
  out += integrate_smooth(upper, std::sqrt(hi - r), std::sqrt(hi - mid), piece_tol, cfg.max_levels);
  return out;
}

/// g(r) = integral from r_min to r of d rho / (rho sqrt(f(rho))).
inline QuadratureResult g_of_r_detailed(const OrbitParams& params, const TurningPoints& tp, double r,
                                        const QuadratureConfig& cfg = {}) {
  const OrbitProfile profile(params, tp);
  return inverse_sqrt_integral(profile, [](double rho) { return 1.0 / rho; }, r, cfg);
}

inline double g_of_r(const OrbitParams& params, const TurningPoints& tp, double r, const QuadratureConfig& cfg = {}) {
  return g_of_r_detailed(params, tp, r, cfg).value;
}

inline ApsidalResult apsidal_angle(const OrbitParams& params, const TurningPoints& tp,
                                   const QuadratureConfig& cfg = {}) {
  const QuadratureResult q = g_of_r_detailed(params, tp, tp.r_max, cfg);
  return {q.value, q.err_estimate, q.evaluations};
}

inline ApsidalResult apsidal_angle(const OrbitParams& params, const QuadratureConfig& cfg = {}) {
  return apsidal_angle(params, find_turning_points(params), cfg);
}

/// Time of one full radial oscillation, 2 * integral of rho / (L sqrt(f)).
inline double radial_period(const OrbitParams& params, const TurningPoints& tp, const QuadratureConfig& cfg = {}) {
  const OrbitProfile profile(params, tp);
  const double L = params.angmom();
  return 2.0 * inverse_sqrt_integral(profile, [L](double rho) { return rho / L; }, tp.r_max, cfg).value;
}

inline double radial_period(const OrbitParams& params, const QuadratureConfig& cfg = {}) {
  return radial_period(params, find_turning_points(params), cfg);
}

}  // namespace fbrs
