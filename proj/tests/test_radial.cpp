#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fbrs/radial.hpp"

using fbrs::Errc;
using fbrs::OrbitClass;
using fbrs::OrbitParams;
using fbrs::Potential;

namespace {

template <class Fn>
Errc code_of(Fn&& fn) {
  try {
    fn();
  } catch (const fbrs::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an fbrs::Error";
  return Errc::InvalidParameter;
}

/// Oracle: sign changes of f on a 10^6-point log grid over [1e-4, 1e4],
/// each refined by plain bisection to machine precision.
std::vector<double> brute_force_roots(const OrbitParams& params) {
  auto f = [&](double r) {
    const double L = params.angmom();
    const double U = params.potential().value(r);
    return 2.0 * r * r / (L * L) * (params.energy() - U) - 1.0;
  };
  std::vector<double> roots;
  constexpr int n = 1'000'000;
  double r0 = 1e-4;
  double f0 = f(r0);
  for (int i = 1; i <= n; ++i) {
    const double r1 = 1e-4 * std::pow(1e8, static_cast<double>(i) / n);
    const double f1 = f(r1);
    if ((f0 < 0.0) != (f1 < 0.0)) {
      double lo = r0, hi = r1;
      const bool lo_neg = f0 < 0.0;
      for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        ((f(mid) < 0.0) == lo_neg ? lo : hi) = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    r0 = r1;
    f0 = f1;
  }
  return roots;
}

struct Case {
  Potential pot;
  double E;
  double L;
};

std::vector<Case> bounded_cases() {
  return {{Potential::kepler(), -0.375, 1.0},         {Potential::kepler(), -0.1, 2.0},
          {Potential::hooke(1.0), 1.25, 1.0},         {Potential::hooke(2.0), 5.0, 0.7},
          {Potential::logarithmic(), 1.0, 1.0},       {Potential::power_law(3.0), 1.0, 1.0},
          {Potential::power_law(-1.5), -0.14, 1.0},   {Potential::power_law(0.5), 3.0, 1.0},
          {Potential::power_law(-0.5), -1.4, 1.0}};
}

}  // namespace

TEST(Radial, EffectivePotentialExamples) {
  EXPECT_DOUBLE_EQ(fbrs::effective_potential(OrbitParams(Potential::kepler(), 0.0, 1.0), 1.0), -0.5);
  EXPECT_DOUBLE_EQ(fbrs::effective_potential(OrbitParams(Potential::hooke(1.0), 0.0, 1.0), 1.0), 1.0);
  EXPECT_EQ(code_of([] { OrbitParams(Potential::kepler(), -0.3, 0.0); }), Errc::InvalidParameter);
  EXPECT_EQ(code_of([] { (void)fbrs::effective_potential(OrbitParams(Potential::kepler(), 0.0, 1.0), 0.0); }),
            Errc::NonPositiveRadius);
}

TEST(Radial, NegativeAngularMomentumIsReflected) {
  const OrbitParams p(Potential::kepler(), -0.375, -1.0);
  EXPECT_EQ(p.angmom(), 1.0);
  EXPECT_TRUE(p.reflected());
  EXPECT_FALSE(OrbitParams(Potential::kepler(), -0.375, 1.0).reflected());
}

TEST(Radial, RadialFunctionExamples) {
  const OrbitParams kep(Potential::kepler(), -0.375, 1.0);
  EXPECT_DOUBLE_EQ(fbrs::radial_function_f(kep, 1.0), 0.25);
  EXPECT_NEAR(fbrs::radial_function_f(kep, 2.0 / 3.0), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(fbrs::radial_function_f(OrbitParams(Potential::hooke(1.0), 1.25, 1.0), 1.0), 0.5);
}

TEST(Radial, RadialFunctionDerivativeMatchesDifferences) {
  for (const auto& c : bounded_cases()) {
    const OrbitParams p(c.pot, c.E, c.L);
    for (const double r : {0.6, 1.0, 1.7}) {
      const double h = 1e-5 * r;
      const double fd = (fbrs::radial_function_f(p, r + h) - fbrs::radial_function_f(p, r - h)) / (2.0 * h);
      EXPECT_NEAR(fbrs::radial_function_f_derivative(p, r), fd, 1e-7 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(Radial, CircularRadiusExamples) {
  EXPECT_NEAR(fbrs::find_circular_radius(OrbitParams(Potential::kepler(), 0.0, 1.0)), 1.0, 1e-12);
  EXPECT_NEAR(fbrs::find_circular_radius(OrbitParams(Potential::hooke(1.0), 0.0, 1.0)), 1.0, 1e-12);
  EXPECT_NEAR(fbrs::find_circular_radius(OrbitParams(Potential::logarithmic(), 0.0, 1.0)), 1.0, 1e-12);
  // Kepler r_c = L^2; Hooke r_c = sqrt(L / omega).
  EXPECT_NEAR(fbrs::find_circular_radius(OrbitParams(Potential::kepler(), 0.0, 2.0)), 4.0, 4e-12);
  EXPECT_NEAR(fbrs::find_circular_radius(OrbitParams(Potential::hooke(2.0), 0.0, 0.5)), 0.5, 1e-12);
}

TEST(Radial, TurningPointExamples) {
  const auto kep = fbrs::find_turning_points(OrbitParams(Potential::kepler(), -0.375, 1.0));
  EXPECT_NEAR(kep.r_min, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(kep.r_max, 2.0, 1e-12);
  const auto hk = fbrs::find_turning_points(OrbitParams(Potential::hooke(1.0), 1.25, 1.0));
  EXPECT_NEAR(hk.r_min, 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(hk.r_max, std::sqrt(2.0), 1e-12);
  EXPECT_EQ(code_of([] { (void)fbrs::find_turning_points(OrbitParams(Potential::kepler(), -0.5, 1.0)); }),
            Errc::CircularDegenerate);
  EXPECT_EQ(code_of([] { (void)fbrs::find_turning_points(OrbitParams(Potential::kepler(), 0.1, 1.0)); }),
            Errc::NotBounded);
  EXPECT_EQ(code_of([] { (void)fbrs::find_turning_points(OrbitParams(Potential::kepler(), -0.6, 1.0)); }),
            Errc::NotBounded);
}

TEST(Radial, ClassifyExamples) {
  EXPECT_EQ(fbrs::classify_orbit(OrbitParams(Potential::kepler(), 0.1, 1.0)), OrbitClass::Unbounded);
  EXPECT_EQ(fbrs::classify_orbit(OrbitParams(Potential::kepler(), 0.0, 1.0)), OrbitClass::Unbounded);
  EXPECT_EQ(fbrs::classify_orbit(OrbitParams(Potential::hooke(1.0), 1.25, 1.0)), OrbitClass::Bounded);
  EXPECT_EQ(fbrs::classify_orbit(OrbitParams(Potential::kepler(), -0.6, 1.0)), OrbitClass::Forbidden);
  EXPECT_EQ(fbrs::classify_orbit(OrbitParams(Potential::kepler(), -0.5, 1.0)), OrbitClass::Circular);
  EXPECT_EQ(fbrs::classify_orbit(OrbitParams(Potential::power_law(-1.5), 0.01, 1.0)), OrbitClass::Unbounded);
  EXPECT_EQ(fbrs::classify_orbit(OrbitParams(Potential::logarithmic(), 100.0, 1.0)), OrbitClass::Bounded);
  EXPECT_EQ(fbrs::to_string(OrbitClass::Forbidden), "forbidden");
}

TEST(Radial, TurningPointsMatchBruteForceOracle) {
  for (const auto& c : bounded_cases()) {
    const OrbitParams p(c.pot, c.E, c.L);
    const auto tp = fbrs::find_turning_points(p);
    const auto roots = brute_force_roots(p);
    ASSERT_EQ(roots.size(), 2u) << c.pot.to_string() << " E=" << c.E;
    EXPECT_NEAR(tp.r_min, roots[0], 1e-9 * roots[0]) << c.pot.to_string();
    EXPECT_NEAR(tp.r_max, roots[1], 1e-9 * roots[1]) << c.pot.to_string();
  }
}

TEST(Radial, SignPropertiesAndCertificates) {
  for (const auto& c : bounded_cases()) {
    const OrbitParams p(c.pot, c.E, c.L);
    const auto tp = fbrs::find_turning_points(p);
    EXPECT_GT(tp.r_min, 0.0);
    EXPECT_LT(tp.r_min, tp.r_max);
    EXPECT_LT(tp.dVL_at_rmin, 0.0) << c.pot.to_string();
    EXPECT_GT(tp.dVL_at_rmax, 0.0) << c.pot.to_string();
    EXPECT_NEAR(fbrs::radial_function_f(p, tp.r_min), 0.0, 1e-10);
    EXPECT_NEAR(fbrs::radial_function_f(p, tp.r_max), 0.0, 1e-10);
    for (int i = 1; i < 100; ++i) {
      const double r = tp.r_min + tp.width() * i / 100.0;
      EXPECT_GT(fbrs::radial_function_f(p, r), 0.0) << c.pot.to_string() << " r=" << r;
    }
    const double eps = 1e-4 * tp.width();
    EXPECT_LT(fbrs::radial_function_f(p, tp.r_min - eps), 0.0);
    EXPECT_LT(fbrs::radial_function_f(p, tp.r_max + eps), 0.0);
  }
}

TEST(Radial, NearlyCircularOrbitStillResolves) {
  const OrbitParams p(Potential::kepler(), -0.5 + 1e-8, 1.0);
  const auto tp = fbrs::find_turning_points(p);
  // e = sqrt(1 - 2 L^2 |E|), r = L^2 / (1 +- e)
  const double e = std::sqrt(1.0 - 2.0 * std::abs(p.energy()));
  EXPECT_NEAR(tp.r_min, 1.0 / (1.0 + e), 1e-9);
  EXPECT_NEAR(tp.r_max, 1.0 / (1.0 - e), 1e-9);
}
