#pragma once

#include "dynassign/snapshot.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dynassign {

enum class SolveStatus { Optimal, Infeasible };

// One entry per ascent or augmentation of the dual-ascent solver, recorded
// when AscentOptions::keep_log is set. Used by the invariant battery: dual
// feasibility must hold at every row, the dual objective must be monotone
// and end equal to the added primal cost.
struct IterationRecord {
  std::uint64_t index{0};
  std::string action;      // "ascend" or "augment"
  std::uint32_t producer{0};
  std::int32_t request{-1};  // request index for the multi-request solver
  Rational delta;            // potential raise resp. flow pushed
  Rational dual_objective;
  Rational primal_cost;  // cost of weights added by this solve so far
  bool dual_feasible{false};
  bool weights_on_tight_edges{false};
};

struct SolveResult {
  SolveStatus status{SolveStatus::Optimal};
  // Full solution (frozen weights plus everything this solve added) and the
  // added part alone. On Infeasible the fields hold the partial state at
  // abort and carry no optimality meaning.
  Assignment assignment;
  Assignment added;
  Rational cost{0};        // over `assignment`
  Rational added_cost{0};  // over `added`
  std::optional<DualCertificate> certificate;
  std::uint64_t iterations{0};
  std::uint64_t work{0};  // edge scans, tracks solver effort
  std::vector<IterationRecord> log;
};

struct AscentOptions {
  bool keep_log{false};
};

// Exact minimum-cost transportation solve via successive shortest paths
// with node potentials. Serves every remaining demand within residual
// capacities at minimum added cost; frozen weights are kept as-is.
// No certificate: this is the independent reference route, the dual route
// is the ascent below.
SolveResult solve_optimal(const Snapshot& snap);

// Benefit of raising a producer potential: remaining demand minus the
// residual capacities of its currently tight consumers.
Rational benefit(ProducerId producer, const DualCertificate& cert, const Snapshot& snap);

// Dual-ascent solver: repeatedly picks the producer with the highest
// benefit (ties toward the lowest id), raises potentials along an
// alternating tree of tight edges by the minimum slack, and augments
// through the tight subgraph once a consumer with residual capacity is
// reached. Exact, monotone in the potentials, dual-feasible after every
// iteration, complementary-slack at exit.
SolveResult primal_dual_offline(const Snapshot& snap, const AscentOptions& opts = {});

// How an ascent step is attributed across a producer's open requests in
// the multi-request solver. The attribution fixes the intermediate
// potential trajectory (visible in the log); each full step still sums to
// the same total raise, so the final solution does not depend on the rule.
enum class ShareRule {
  DemandShare,    // request amount over the producer's total open amount
  ResidualShare,  // request amount over the residual of the consumer about
                  // to become tight, clamped to [0,1], then normalized
};

// Multi-request variant: per-producer demand is the sum of that producer's
// requests; selection uses per-request benefit (ties toward lowest
// producer id, then lowest request index) and augmentations are capped by
// the selected request's open amount.
SolveResult primal_dual_multi_request(const Snapshot& snap,
                                      const std::vector<std::pair<ProducerId, Rational>>& requests,
                                      ShareRule rule = ShareRule::DemandShare,
                                      const AscentOptions& opts = {});

// Forward complementary slackness: every weight added by the solve sits on
// a constraint the certificate prices tight (checked against the actual
// distances, not the stored tight set). The converse direction is allowed
// to fail on degenerate optima and is not part of the verdict.
bool verify_slackness(const SolveResult& result, const Snapshot& snap);

}  // namespace dynassign
