#pragma once

#include "dynassign/model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace dynassign {

// Immutable view of a GraphState at one clock value, in the shape the
// solvers want: dense rows/cols over the alive part of the graph, original
// ids kept for reporting.
//
// Two flavors:
//   fresh()    - full announced demands against full capacities, nothing
//                committed; what the offline optimum is computed on.
//   residual() - unserved demand against leftover capacity, with the
//                current assignment frozen; committed weight is never
//                reallocated by a solve on such a snapshot.
struct Snapshot {
  struct ProducerRow {
    ProducerId id;
    Rational remaining;  // demand still to be served
  };
  struct ConsumerCol {
    ConsumerId id;
    Rational residual;  // capacity still available
  };

  std::vector<ProducerRow> producers;
  std::vector<ConsumerCol> consumers;
  std::vector<std::vector<Rational>> distance;  // [row][col]
  std::vector<std::vector<char>> usable;        // [row][col], 0/1
  Assignment frozen;                            // committed weights, original ids
  Rational frozen_cost{0};

  static Snapshot fresh(const GraphState& state);
  static Snapshot residual(const GraphState& state);

  std::optional<std::size_t> row_of(ProducerId p) const;
  std::optional<std::size_t> col_of(ConsumerId c) const;

  Rational total_remaining() const;
  Rational total_residual() const;
};

// Dual potentials plus the set of tight constraints, keyed by original ids.
// Feasibility means y ≥ 0, z ≥ 0 and y_i − z_j ≤ d_ij on every usable pair;
// the tight set holds exactly the pairs met with equality.
struct DualCertificate {
  std::map<std::uint32_t, Rational> y;
  std::map<std::uint32_t, Rational> z;
  std::set<std::pair<std::uint32_t, std::uint32_t>> tight_set;

  Rational y_of(ProducerId p) const;
  Rational z_of(ConsumerId c) const;
  bool tight(ProducerId p, ConsumerId c) const;

  // Σ y_i·R_i − Σ z_j·M_j over the snapshot's remaining demands and
  // residual capacities.
  Rational dual_objective(const Snapshot& snap) const;

  // Potential bounds and the potential-limit inequality on every usable
  // pair, plus tight_set consistency with the actual equalities.
  bool feasible_for(const Snapshot& snap) const;
  void recompute_tight(const Snapshot& snap);

  // Same checks against a live graph (alive nodes, alive edges).
  bool feasible_for(const GraphState& graph) const;
  void recompute_tight(const GraphState& graph);

  bool operator==(const DualCertificate&) const = default;
};

}  // namespace dynassign
