#pragma once

#include "dynassign/rational.hpp"

#include <cstdint>

namespace dynassign {

// Directed rational bounds on ln(n). The natural log is the single
// non-exact quantity in the system; it never enters an algorithmic
// decision, only reported bounds and generator shaping. Bounds are
// guaranteed: ln_lower(n) <= ln(n) <= ln_upper(n), exact 0 for n = 1.
Rational ln_upper(std::uint64_t n, int digits = 12);
Rational ln_lower(std::uint64_t n, int digits = 12);

}  // namespace dynassign
