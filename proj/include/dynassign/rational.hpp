#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace dynassign {

using Int = boost::multiprecision::cpp_int;

// Every quantity in the engine (demands, capacities, distances, weights,
// potentials) is an exact rational. cpp_rational keeps values normalized:
// denominator > 0 and gcd(|num|, den) = 1, so equality tests are exact.
using Rational = boost::multiprecision::cpp_rational;

// Parses "p/q", an integer ("-3"), or a finite decimal ("2.5", ".25").
// Throws Error on anything else, including q = 0.
Rational parse_rational(const std::string& text);

// Canonical form: "p" when the denominator is 1, otherwise "p/q".
std::string format_rational(const Rational& value);

// Fixed-point decimal rendering with the given number of fraction digits,
// rounded to nearest. Reporting only; never feeds back into the engine.
std::string to_decimal_string(const Rational& value, int digits);

inline double to_double(const Rational& value) {
  return value.convert_to<double>();
}

}  // namespace dynassign
