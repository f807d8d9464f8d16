#include "dynassign/approx.hpp"

#include "dynassign/errors.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace dynassign {

namespace {

using Float = boost::multiprecision::cpp_bin_float_50;

// Scaled integer floor of ln(n) with one grid step of safety margin in the
// requested direction. cpp_bin_float_50 carries ~50 decimal digits, so a
// whole 10^-digits step swallows its rounding error many times over.
Int scaled_ln(std::uint64_t n, int digits, bool round_up) {
  Float value = log(Float(n));
  Float scale = pow(Float(10), digits);
  Float scaled = value * scale;
  Int base = floor(scaled).convert_to<Int>();
  if (round_up) return Int(base + 1);
  return Int(base - 1);
}

}  // namespace

Rational ln_upper(std::uint64_t n, int digits) {
  if (n == 0) throw DomainError("ln of zero");
  if (n == 1) return 0;
  Int scale = pow(Int(10), digits);
  return Rational(scaled_ln(n, digits, true), scale);
}

Rational ln_lower(std::uint64_t n, int digits) {
  if (n == 0) throw DomainError("ln of zero");
  if (n == 1) return 0;
  Int scale = pow(Int(10), digits);
  Rational r(scaled_ln(n, digits, false), scale);
  return r < 0 ? Rational(0) : r;  // ln is nonnegative on integers
}

}  // namespace dynassign
