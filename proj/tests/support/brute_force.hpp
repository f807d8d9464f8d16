#pragma once

#include "dynassign/snapshot.hpp"

#include <optional>

namespace testsupport {

// Exhaustive exact optimum for small instances, used as the independent
// reference the solvers are judged against. Demands and capacities must be
// non-negative integers (transportation problems with integer data have
// integer optima, so integer enumeration is exhaustive). Distances may be
// any rationals. Limits: at most 6 producers and 6 consumers, no value
// above 12; anything larger is a test bug and throws std::logic_error.
//
// Returns the minimum cost of the added weights, or nothing when the
// remaining demand cannot be served.
std::optional<dynassign::Rational> brute_force_cost(const dynassign::Snapshot& snap);

}  // namespace testsupport
