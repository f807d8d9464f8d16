#include "dynassign/rational.hpp"

#include "dynassign/errors.hpp"

#include <cctype>
#include <cstddef>

namespace dynassign {

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s = text;
  bool negative = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    negative = s[0] == '-';
    s.erase(0, 1);
  }
  if (s.empty()) throw Error("empty rational literal: '" + text + "'");

  Rational value;
  auto slash = s.find('/');
  auto dot = s.find('.');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      throw Error("malformed rational literal: '" + text + "'");
    }
    Int d(den);
    if (d == 0) throw Error("zero denominator in rational literal: '" + text + "'");
    value = Rational(Int(num), d);
  } else if (dot != std::string::npos) {
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (frac.empty()) frac = "0";
    if (!all_digits(whole) || !all_digits(frac)) {
      throw Error("malformed decimal literal: '" + text + "'");
    }
    Int scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    value = Rational(Int(whole) * scale + Int(frac), scale);
  } else {
    if (!all_digits(s)) throw Error("malformed integer literal: '" + text + "'");
    value = Rational(Int(s));
  }
  if (negative) value = -value;
  return value;
}

std::string format_rational(const Rational& value) {
  const Int num = boost::multiprecision::numerator(value);
  const Int den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string to_decimal_string(const Rational& value, int digits) {
  Int scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  Rational scaled = value * scale;
  Int whole = boost::multiprecision::numerator(scaled) / boost::multiprecision::denominator(scaled);
  // Round to nearest, half away from zero.
  Rational rem = scaled - whole;
  if (rem * 2 >= 1) whole += 1;
  if (rem * 2 <= -1) whole -= 1;
  bool neg = whole < 0;
  Int mag = neg ? Int(-whole) : whole;
  std::string s = mag.str();
  if (static_cast<int>(s.size()) <= digits) {
    s.insert(0, static_cast<std::size_t>(digits + 1 - s.size()), '0');
  }
  if (digits > 0) s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  return (neg ? "-" : "") + s;
}

}  // namespace dynassign
