#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "fbrs/error.hpp"

namespace fbrs {

enum class PotentialKind { Kepler, Hooke, PowerLaw, Logarithmic };

/// Closed-form central potential U(r) per unit mass.
///
///   Kepler       U = -1/r
///   Hooke        U = omega^2 r^2 / 2
///   PowerLaw     U = r^p / p        (p > -2, p != 0)
///   Logarithmic  U = ln r           (the p -> 0 member of the power-law family)
///
/// Values are immutable once constructed.
class Potential {
 public:
  static Potential kepler() { return Potential(PotentialKind::Kepler, 0.0, -1.0); }

  static Potential hooke(double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega)) {
      throw Error(Errc::InvalidParameter, "hooke frequency must be positive and finite");
    }
    return Potential(PotentialKind::Hooke, omega, 2.0);
  }

  static Potential power_law(double p) {
    if (!std::isfinite(p) || !(p > -2.0)) {
      throw Error(Errc::InvalidParameter, "power-law exponent must satisfy p > -2");
    }
    if (p == 0.0) {
      throw Error(Errc::InvalidParameter, "power-law exponent p = 0 is the logarithmic potential");
    }
    return Potential(PotentialKind::PowerLaw, 0.0, p);
  }

  static Potential logarithmic() { return Potential(PotentialKind::Logarithmic, 0.0, 0.0); }

  PotentialKind kind() const noexcept { return kind_; }
  double omega() const noexcept { return omega_; }
  double exponent() const noexcept { return exponent_; }

  double value(double r) const {
    require_positive(r);
    switch (kind_) {
      case PotentialKind::Kepler: return -1.0 / r;
      case PotentialKind::Hooke: return 0.5 * omega_ * omega_ * r * r;
      case PotentialKind::PowerLaw:
        // p = -1 must reproduce the Kepler value bit for bit.
        if (exponent_ == -1.0) return -1.0 / r;
        return std::pow(r, exponent_) / exponent_;
      case PotentialKind::Logarithmic: return std::log(r);
    }
    return 0.0;
  }

  double derivative(double r) const {
    require_positive(r);
    switch (kind_) {
      case PotentialKind::Kepler: return 1.0 / (r * r);
      case PotentialKind::Hooke: return omega_ * omega_ * r;
      case PotentialKind::PowerLaw:
        if (exponent_ == -1.0) return 1.0 / (r * r);
        return std::pow(r, exponent_ - 1.0);
      case PotentialKind::Logarithmic: return 1.0 / r;
    }
    return 0.0;
  }

  double second_derivative(double r) const {
    require_positive(r);
    switch (kind_) {
      case PotentialKind::Kepler: return -2.0 / (r * r * r);
      case PotentialKind::Hooke: return omega_ * omega_;
      case PotentialKind::PowerLaw: return (exponent_ - 1.0) * std::pow(r, exponent_ - 2.0);
      case PotentialKind::Logarithmic: return -1.0 / (r * r);
    }
    return 0.0;
  }

  /// Secant slope (U(b) - U(a)) / (b - a), evaluated without cancellation;
  /// returns U'(a) when a == b.
  double divided_difference(double a, double b) const {
    require_positive(a);
    require_positive(b);
    if (a == b) return derivative(a);
    switch (kind_) {
      case PotentialKind::Kepler: return 1.0 / (a * b);
      case PotentialKind::Hooke: return 0.5 * omega_ * omega_ * (a + b);
      case PotentialKind::PowerLaw: {
        if (exponent_ == -1.0) return 1.0 / (a * b);
        const double x = (b - a) / a;
        const double p = exponent_;
        return std::pow(a, p - 1.0) * std::expm1(p * std::log1p(x)) / (p * x);
      }
      case PotentialKind::Logarithmic: {
        const double x = (b - a) / a;
        return std::log1p(x) / (a * x);
      }
    }
    return 0.0;
  }

  /// lim_{r -> inf} U(r); +inf for confining potentials.
  double asymptote() const noexcept {
    switch (kind_) {
      case PotentialKind::Kepler: return 0.0;
      case PotentialKind::PowerLaw:
        return exponent_ < 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      case PotentialKind::Hooke:
      case PotentialKind::Logarithmic: return std::numeric_limits<double>::infinity();
    }
    return std::numeric_limits<double>::infinity();
  }

  /// Canonical text form accepted by parse_potential.
  std::string to_string() const;

  friend bool operator==(const Potential&, const Potential&) = default;

 private:
  Potential(PotentialKind kind, double omega, double exponent)
      : kind_(kind), omega_(omega), exponent_(exponent) {}

  static void require_positive(double r) {
    if (!(r > 0.0)) throw Error(Errc::NonPositiveRadius, "radius must be positive, got " + std::to_string(r));
  }

  PotentialKind kind_;
  double omega_;
  double exponent_;
};

inline double eval_potential(const Potential& pot, double r) { return pot.value(r); }

inline double eval_potential_derivative(const Potential& pot, double r) { return pot.derivative(r); }

/// |central difference of U at step h - U'(r)| / max(1, |U'(r)|).
inline double check_derivative(const Potential& pot, double r, double h) {
  if (!(h > 0.0) || !(r > h)) {
    throw Error(Errc::NonPositiveRadius, "check_derivative requires r > h > 0");
  }
  const double fd = (pot.value(r + h) - pot.value(r - h)) / (2.0 * h);
  const double exact = pot.derivative(r);
  return std::abs(fd - exact) / std::max(1.0, std::abs(exact));
}

namespace detail {

inline std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double_token(std::string_view token, std::string_view context) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (token.empty() || ec != std::errc{} || ptr != last) {
    throw Error(Errc::ParseError,
                "invalid number '" + std::string(token) + "' in '" + std::string(context) + "'");
  }
  return value;
}

}  // namespace detail

inline std::string Potential::to_string() const {
  switch (kind_) {
    case PotentialKind::Kepler: return "kepler";
    case PotentialKind::Hooke: return "hooke:omega=" + detail::shortest(omega_);
    case PotentialKind::PowerLaw: return "powerlaw:p=" + detail::shortest(exponent_);
    case PotentialKind::Logarithmic: return "log";
  }
  return "";
}

/// Parses `kepler`, `hooke:omega=<float>`, `powerlaw:p=<float>` or `log`.
/// Parse failures name the offending token.
inline Potential parse_potential(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view tail = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

  auto expect_no_args = [&](std::string_view name) {
    if (colon != std::string_view::npos) {
      throw Error(Errc::ParseError, "potential '" + std::string(name) + "' takes no parameters, got '" +
                                        std::string(tail) + "'");
    }
  };
  auto keyed_value = [&](std::string_view key) {
    if (colon == std::string_view::npos) {
      throw Error(Errc::ParseError, "potential '" + std::string(head) + "' requires '" + std::string(key) + "=<float>'");
    }
    const auto eq = tail.find('=');
    const std::string_view name = tail.substr(0, eq);
    if (eq == std::string_view::npos || name != key) {
      throw Error(Errc::ParseError, "unexpected parameter '" + std::string(name) + "' for potential '" +
                                        std::string(head) + "' (expected '" + std::string(key) + "')");
    }
    return detail::parse_double_token(tail.substr(eq + 1), text);
  };

  if (head == "kepler") {
    expect_no_args(head);
    return Potential::kepler();
  }
  if (head == "log") {
    expect_no_args(head);
    return Potential::logarithmic();
  }
  auto build = [&](auto&& factory, std::string_view key) {
    const double v = keyed_value(key);
    try {
      return factory(v);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (in '" + std::string(text) + "')");
    }
  };
  if (head == "hooke") return build([](double v) { return Potential::hooke(v); }, "omega");
  if (head == "powerlaw") return build([](double v) { return Potential::power_law(v); }, "p");
  throw Error(Errc::ParseError, "unknown potential '" + std::string(head) + "'");
}

}  // namespace fbrs
