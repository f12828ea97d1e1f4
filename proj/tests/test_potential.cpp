#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fbrs/potential.hpp"

using fbrs::Errc;
using fbrs::Potential;

namespace {

std::vector<Potential> all_variants() {
  return {Potential::kepler(),           Potential::hooke(1.0),        Potential::hooke(2.5),
          Potential::power_law(-1.5),    Potential::power_law(-0.5),   Potential::power_law(0.5),
          Potential::power_law(1.0),     Potential::power_law(2.0),    Potential::power_law(3.0),
          Potential::logarithmic()};
}

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

}  // namespace

TEST(Potential, ValueExamples) {
  EXPECT_DOUBLE_EQ(fbrs::eval_potential(Potential::kepler(), 2.0), -0.5);
  EXPECT_NEAR(fbrs::eval_potential(Potential::hooke(1.0), std::sqrt(2.0)), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(fbrs::eval_potential(Potential::power_law(2.0), 1.0), 0.5);
  EXPECT_DOUBLE_EQ(fbrs::eval_potential(Potential::logarithmic(), 1.0), 0.0);
}

TEST(Potential, DerivativeExamples) {
  EXPECT_DOUBLE_EQ(fbrs::eval_potential_derivative(Potential::kepler(), 2.0), 0.25);
  EXPECT_DOUBLE_EQ(fbrs::eval_potential_derivative(Potential::hooke(2.0), 1.0), 4.0);
  EXPECT_DOUBLE_EQ(fbrs::eval_potential_derivative(Potential::logarithmic(), 4.0), 0.25);
  EXPECT_DOUBLE_EQ(fbrs::eval_potential_derivative(Potential::power_law(3.0), 2.0), 4.0);
}

TEST(Potential, NonPositiveRadiusRejected) {
  for (const auto& pot : all_variants()) {
    EXPECT_EQ(code_of([&] { (void)pot.value(0.0); }), Errc::NonPositiveRadius) << pot.to_string();
    EXPECT_EQ(code_of([&] { (void)pot.derivative(-1.0); }), Errc::NonPositiveRadius) << pot.to_string();
  }
}

TEST(Potential, InvalidParametersRejected) {
  EXPECT_EQ(code_of([] { (void)Potential::power_law(0.0); }), Errc::InvalidParameter);
  EXPECT_EQ(code_of([] { (void)Potential::power_law(-2.0); }), Errc::InvalidParameter);
  EXPECT_EQ(code_of([] { (void)Potential::power_law(-3.0); }), Errc::InvalidParameter);
  EXPECT_EQ(code_of([] { (void)Potential::hooke(0.0); }), Errc::InvalidParameter);
  EXPECT_EQ(code_of([] { (void)Potential::hooke(-1.0); }), Errc::InvalidParameter);
}

TEST(Potential, CheckDerivativeExamples) {
  EXPECT_LE(fbrs::check_derivative(Potential::kepler(), 1.0, 1e-4), 1e-7);
  EXPECT_LE(fbrs::check_derivative(Potential::hooke(1.0), 1.0, 1e-3), 1e-12);
  EXPECT_LE(fbrs::check_derivative(Potential::power_law(3.0), 2.0, 1e-4), 1e-7);
  EXPECT_EQ(code_of([] { (void)fbrs::check_derivative(Potential::kepler(), 1e-4, 1e-4); }), Errc::NonPositiveRadius);
  EXPECT_EQ(code_of([] { (void)fbrs::check_derivative(Potential::kepler(), 1.0, 0.0); }), Errc::NonPositiveRadius);
}

TEST(Potential, CheckDerivativeOnLogGrid) {
  for (const auto& pot : all_variants()) {
    for (int i = 0; i <= 60; ++i) {
      const double r = std::pow(10.0, -3.0 + 0.1 * i);
      EXPECT_LE(fbrs::check_derivative(pot, r, 1e-5 * r), 1e-6) << pot.to_string() << " r=" << r;
    }
  }
}

TEST(Potential, SecondDerivativeMatchesDifferences) {
  for (const auto& pot : all_variants()) {
    for (const double r : {0.3, 1.0, 2.7}) {
      const double h = 1e-4 * r;
      const double fd = (pot.derivative(r + h) - pot.derivative(r - h)) / (2.0 * h);
      EXPECT_NEAR(pot.second_derivative(r), fd, 1e-6 * std::max(1.0, std::abs(fd))) << pot.to_string();
    }
  }
}

TEST(Potential, DividedDifferenceMatchesDirectQuotient) {
  for (const auto& pot : all_variants()) {
    for (const auto& [a, b] : {std::pair{0.5, 2.0}, std::pair{1.0, 1.5}, std::pair{3.0, 0.7}}) {
      const double direct = (pot.value(b) - pot.value(a)) / (b - a);
      EXPECT_NEAR(pot.divided_difference(a, b), direct, 1e-13 * std::max(1.0, std::abs(direct))) << pot.to_string();
    }
    // Close arguments: the quotient tends to the derivative.
    const double r = 1.3;
    EXPECT_NEAR(pot.divided_difference(r, r * (1 + 1e-12)), pot.derivative(r), 1e-9) << pot.to_string();
    EXPECT_NEAR(pot.divided_difference(r, r), pot.derivative(r), 1e-14) << pot.to_string();
  }
}

TEST(Potential, PowerLawMinusOneEqualsKeplerExactly) {
  const auto pl = Potential::power_law(-1.0);
  const auto kep = Potential::kepler();
  for (int i = 0; i <= 60; ++i) {
    const double r = std::pow(10.0, -3.0 + 0.1 * i);
    EXPECT_EQ(pl.value(r), kep.value(r));
    EXPECT_EQ(pl.derivative(r), kep.derivative(r));
  }
}

TEST(Potential, Asymptotes) {
  EXPECT_EQ(Potential::kepler().asymptote(), 0.0);
  EXPECT_EQ(Potential::power_law(-1.5).asymptote(), 0.0);
  EXPECT_TRUE(std::isinf(Potential::hooke(1.0).asymptote()));
  EXPECT_TRUE(std::isinf(Potential::logarithmic().asymptote()));
  EXPECT_TRUE(std::isinf(Potential::power_law(0.5).asymptote()));
}

TEST(PotentialParse, AcceptsGrammar) {
  EXPECT_EQ(fbrs::parse_potential("kepler"), Potential::kepler());
  EXPECT_EQ(fbrs::parse_potential("hooke:omega=2"), Potential::hooke(2.0));
  EXPECT_EQ(fbrs::parse_potential("powerlaw:p=-1.5"), Potential::power_law(-1.5));
  EXPECT_EQ(fbrs::parse_potential("log"), Potential::logarithmic());
}

TEST(PotentialParse, RoundTripsThroughToString) {
  for (const auto& pot : all_variants()) EXPECT_EQ(fbrs::parse_potential(pot.to_string()), pot) << pot.to_string();
}

TEST(PotentialParse, ErrorsNameTheOffendingToken) {
  auto message_of = [](const char* text) -> std::string {
    try {
      (void)fbrs::parse_potential(text);
    } catch (const fbrs::Error& e) {
      EXPECT_TRUE(e.code() == Errc::ParseError || e.code() == Errc::InvalidParameter) << text;
      return e.what();
    }
    ADD_FAILURE() << "no error for " << text;
    return {};
  };
  EXPECT_NE(message_of("kepla").find("kepla"), std::string::npos);
  EXPECT_NE(message_of("hooke:omega=abc").find("abc"), std::string::npos);
  EXPECT_NE(message_of("hooke:w=1").find("w"), std::string::npos);
  EXPECT_NE(message_of("powerlaw:p=1x").find("1x"), std::string::npos);
  EXPECT_NE(message_of("kepler:k=1").find("k=1"), std::string::npos);
  EXPECT_NE(message_of("powerlaw:p=-2").find("-2"), std::string::npos);
  EXPECT_FALSE(message_of("").empty());
}
