#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fbrs {

enum class Errc {
  NonPositiveRadius,
  InvalidParameter,
  ParseError,
  NoMinimumFound,
  CircularDegenerate,
  NotBounded,
  OutsideRadialRange,
  ToleranceNotReached,
  StepFailure,
  AmbiguousApsis,
  InvalidPhase,
  ApsidalSingularity,
  NotHooke,
};

/// Coarse grouping used for process exit codes.
enum class ErrorCategory { Configuration, Physics, Numerical };

constexpr std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NonPositiveRadius: return "NonPositiveRadius";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::ParseError: return "ParseError";
    case Errc::NoMinimumFound: return "NoMinimumFound";
    case Errc::CircularDegenerate: return "CircularDegenerate";
    case Errc::NotBounded: return "NotBounded";
    case Errc::OutsideRadialRange: return "OutsideRadialRange";
    case Errc::ToleranceNotReached: return "ToleranceNotReached";
    case Errc::StepFailure: return "StepFailure";
    case Errc::AmbiguousApsis: return "AmbiguousApsis";
    case Errc::InvalidPhase: return "InvalidPhase";
    case Errc::ApsidalSingularity: return "ApsidalSingularity";
    case Errc::NotHooke: return "NotHooke";
  }
  return "Unknown";
}

constexpr ErrorCategory errc_category(Errc code) noexcept {
  switch (code) {
    case Errc::NonPositiveRadius:
    case Errc::InvalidParameter:
    case Errc::ParseError:
    case Errc::InvalidPhase:
    case Errc::OutsideRadialRange:
      return ErrorCategory::Configuration;
    case Errc::CircularDegenerate:
    case Errc::NotBounded:
    case Errc::ApsidalSingularity:
    case Errc::NotHooke:
      return ErrorCategory::Physics;
    case Errc::NoMinimumFound:
    case Errc::ToleranceNotReached:
    case Errc::StepFailure:
    case Errc::AmbiguousApsis:
      return ErrorCategory::Numerical;
  }
  return ErrorCategory::Numerical;
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return errc_category(code_); }

 private:
  Errc code_;
};

}  // namespace fbrs
