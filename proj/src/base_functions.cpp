#include "fstress/base_functions.hpp"

#include <cmath>
#include <string>

namespace fstress {

std::string_view to_string(BaseFunction base) {
  switch (base) {
    case BaseFunction::Log:
      return "log";
    case BaseFunction::Identity:
      return "identity";
    case BaseFunction::Exp:
      return "exp";
    case BaseFunction::Bounded:
      return "bounded";
    case BaseFunction::LogPlusOne:
      return "log1p";
  }
  throw IndexError("unknown base function value");
}

BaseFunction base_function_from_string(std::string_view tag) {
  for (BaseFunction base : kAllBaseFunctions) {
    if (tag == to_string(base)) return base;
  }
  throw ParseError("unknown base function tag '" + std::string(tag) +
                   "' (expected log, identity, exp, bounded or log1p)");
}

double ScalarDerivs::order(int r) const {
  switch (r) {
    case 0:
      return d0;
    case 1:
      return d1;
    case 2:
      return d2;
    case 3:
      return d3;
    case 4:
      return d4;
    default:
      throw IndexError("derivative order must be in [0, 4], got " +
                       std::to_string(r));
  }
}

ScalarDerivs base_derivs(BaseFunction base, double t) {
  switch (base) {
    case BaseFunction::Log: {
      if (!(t > 0.0)) {
        throw DomainError("log base requires t > 0, got t = " +
                          std::to_string(t));
      }
      const double u = 1.0 / t;
      const double u2 = u * u;
      return {std::log(t), u, -u2, 2.0 * u2 * u, -6.0 * u2 * u2};
    }
    case BaseFunction::Identity:
      return {t, 1.0, 0.0, 0.0, 0.0};
    case BaseFunction::Exp: {
      const double e = std::exp(t);
      return {e, e, e, e, e};
    }
    case BaseFunction::Bounded: {
      if (!(t > -1.0)) {
        throw DomainError("bounded base requires t > -1, got t = " +
                          std::to_string(t));
      }
      const double u = 1.0 / (1.0 + t);
      const double u2 = u * u;
      const double u3 = u2 * u;
      return {t * u, u2, -2.0 * u3, 6.0 * u2 * u2, -24.0 * u2 * u3};
    }
    case BaseFunction::LogPlusOne: {
      if (!(t > -1.0)) {
        throw DomainError("log1p base requires t > -1, got t = " +
                          std::to_string(t));
      }
      const double z = 1.0 / (1.0 + t);
      const double z2 = z * z;
      return {std::log1p(t), z, -z2, 2.0 * z2 * z, -3.0 * 2.0 * z2 * z2};
    }
  }
  throw IndexError("unknown base function value");
}

namespace {

// f0 raised to a real exponent, with the 0^0 = 1 convention and domain
// checks for the cases a real power cannot represent.
double checked_pow(double f0, double e, const FSpec& spec, double t) {
  if (f0 > 0.0) return std::pow(f0, e);
  const bool integer_exponent = (e == std::rint(e)) && std::isfinite(e);
  if (f0 == 0.0) {
    if (e > 0.0) return 0.0;
    if (e == 0.0) return 1.0;
    throw DomainError("power " + std::to_string(spec.power) + " of " +
                      std::string(to_string(spec.base)) + "(t) undefined: " +
                      "base value is 0 at t = " + std::to_string(t) +
                      " with a negative effective exponent");
  }
  if (integer_exponent) return std::pow(f0, e);
  throw DomainError("power " + std::to_string(spec.power) + " of " +
                    std::string(to_string(spec.base)) + "(t) undefined: " +
                    "base value " + std::to_string(f0) + " is negative at t = " +
                    std::to_string(t) + " with non-integer exponent");
}

}  // namespace

ScalarDerivs power_derivs(const FSpec& spec, double t) {
  const ScalarDerivs f = base_derivs(spec.base, t);
  const double q = spec.power;

  // Falling factorials of the exponent.  A term whose coefficient is exactly
  // zero is skipped before its f0 power is formed, so polynomial cases like
  // identity^2 stay finite at f0 = 0 instead of producing 0 * inf.
  const double c1 = q;
  const double c2 = q * (q - 1.0);
  const double c3 = c2 * (q - 2.0);
  const double c4 = c3 * (q - 3.0);

  auto term = [&](double coeff, double exponent_drop, double factor) {
    if (coeff == 0.0) return 0.0;
    return coeff * checked_pow(f.d0, q - exponent_drop, spec, t) * factor;
  };

  ScalarDerivs g;
  g.d0 = checked_pow(f.d0, q, spec, t);
  g.d1 = term(c1, 1.0, f.d1);
  g.d2 = term(c2, 2.0, f.d1 * f.d1) + term(c1, 1.0, f.d2);
  g.d3 = term(c3, 3.0, f.d1 * f.d1 * f.d1) +
         term(3.0 * c2, 2.0, f.d1 * f.d2) + term(c1, 1.0, f.d3);
  g.d4 = term(c4, 4.0, f.d1 * f.d1 * f.d1 * f.d1) +
         term(6.0 * c3, 3.0, f.d1 * f.d1 * f.d2) +
         term(4.0 * c2, 2.0, f.d1 * f.d3) + term(3.0 * c2, 2.0, f.d2 * f.d2) +
         term(c1, 1.0, f.d4);
  return g;
}

}  // namespace fstress
