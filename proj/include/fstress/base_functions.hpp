#pragma once

#include <array>
#include <string_view>

#include "fstress/errors.hpp"

namespace fstress {

// The base transformations applied to a squared distance t = x'Ax before the
// optional power is taken.  Domains:
//
//   Log        ln(t)          t > 0
//   Identity   t              all t
//   Exp        exp(t)         all t
//   Bounded    t / (1 + t)    t > -1
//   LogPlusOne ln(1 + t)      t > -1
enum class BaseFunction { Log, Identity, Exp, Bounded, LogPlusOne };

inline constexpr std::array<BaseFunction, 5> kAllBaseFunctions = {
    BaseFunction::Log, BaseFunction::Identity, BaseFunction::Exp,
    BaseFunction::Bounded, BaseFunction::LogPlusOne};

// Canonical tags used in files and on the command line:
// "log", "identity", "exp", "bounded", "log1p".
std::string_view to_string(BaseFunction base);
BaseFunction base_function_from_string(std::string_view tag);

// Value and first four derivatives of a univariate function at a point.
struct ScalarDerivs {
  double d0 = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double d4 = 0.0;

  double order(int r) const;
};

// A base function raised to a real power; the univariate half of a
// transformed-distance evaluation.  power may be any real number, including
// negative and fractional values.
struct FSpec {
  BaseFunction base = BaseFunction::Identity;
  double power = 1.0;

  bool operator==(const FSpec&) const = default;
};

// Closed-form derivatives of the base function alone.  Throws DomainError
// when t is outside the function's domain.
ScalarDerivs base_derivs(BaseFunction base, double t);

// Derivatives of f(t)^q via the univariate chain rule for powers.  The
// convention 0^0 = 1 applies, and terms whose polynomial coefficient in q
// vanishes are skipped entirely so integer powers of functions with roots
// stay finite.  Throws DomainError when f(t)^q itself is undefined
// (f(t) = 0 with q < 0, or f(t) < 0 with non-integer q, or f(t) = 0 with
// non-integer q for the derivative terms).
ScalarDerivs power_derivs(const FSpec& spec, double t);

}  // namespace fstress
