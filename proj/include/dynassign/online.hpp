#pragma once

#include "dynassign/model.hpp"
#include "dynassign/rng.hpp"
#include "dynassign/snapshot.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dynassign {

struct WeightDelta {
  ProducerId producer;
  ConsumerId consumer;
  Rational delta;  // signed; applying all deltas to the prior assignment
                   // yields the posterior one
};

struct HandlerOutcome {
  std::uint64_t events_consumed{1};
  std::vector<WeightDelta> weight_deltas;
  Rational cost_after{0};
  // Set when the event was refused (demand or residual re-placement does
  // not fit). The state is then exactly as before the call, RNG included.
  std::optional<std::string> rejected;
};

// Event-driven engine: a graph, dual potentials and a seeded RNG. Each
// handler applies one event, restores dual feasibility, commits weight
// where its algorithm says to, and refreshes the tight set. Handlers that
// re-place weight after a failure serve the displaced amounts immediately,
// in ascending producer id, all-or-nothing.
//
// Invariants after every accepted event: capacities respected exactly,
// y_i − z_j ≤ d_ij on every usable edge, weights only on usable edges.
class OnlineState {
 public:
  OnlineState(GraphState initial, std::uint64_t rng_seed);
  explicit OnlineState(const Trace& trace) : OnlineState(trace.initial, trace.rng_seed) {}

  const GraphState& graph() const { return graph_; }
  const DualCertificate& dual() const { return dual_; }
  std::uint64_t op_counter() const { return op_counter_; }
  const std::vector<std::pair<ProducerId, Rational>>& pending_internal() const {
    return pending_internal_;
  }

  // Dispatch on the event kind. CapacityChange increases are plain state
  // mutations; decreases go through the shedding handler.
  HandlerOutcome handle_event(const ServiceRequest& event);

  // The demanding producer commits its amount one edge at a time: tight
  // edges with residual capacity first (lowest consumer id), then a
  // uniformly random slack edge whose constraint is driven tight by
  // raising the producer potential (consumer potentials are clamped up so
  // no constraint is ever violated).
  HandlerOutcome handle_demand(ProducerId producer, const Rational& amount);

  // Updates the distance, clamps the consumer potential so the pair stays
  // feasible, leaves weight in place (its cost shifts by w * d_diff).
  HandlerOutcome handle_distance_change(ProducerId producer, ConsumerId consumer,
                                        const Rational& new_distance);

  // Drops the producer and everything it carried; freed capacity simply
  // returns to the consumers.
  HandlerOutcome handle_producer_failure(ProducerId producer);

  // Inserts a consumer; each producer may move the load of its single
  // highest-distance weighted edge onto the new consumer when the new edge
  // is strictly shorter, lowest producer id first, until the new capacity
  // binds.
  HandlerOutcome handle_consumer_addition(const Rational& capacity,
                                          const std::vector<Rational>& distances);

  // Shrinks capacity; overflow is shed from the minimum-distance weighted
  // edges and re-placed as internal residual demand on other consumers.
  HandlerOutcome handle_capacity_decrease(ConsumerId consumer, const Rational& new_capacity);

  // Wipes the consumer; every producer that lost weight re-places that
  // amount as internal residual demand.
  HandlerOutcome handle_consumer_failure(ConsumerId consumer);

  // Wipes one edge; its weight is re-placed over the producer's remaining
  // edges.
  HandlerOutcome handle_edge_failure(ProducerId producer, ConsumerId consumer);

 private:
  struct Backup;
  Backup save() const;
  void restore(Backup&& b);

  // Residual capacity of a consumer under the current assignment.
  Rational residual_of(ConsumerId c) const;
  // Total capacity the producer can still reach (usable edges, optionally
  // excluding one consumer).
  Rational reachable_residual(ProducerId p, std::optional<ConsumerId> exclude) const;

  // The shared placement loop. Commits exactly `amount` onto the
  // producer's usable edges or reports failure without touching anything
  // beyond what it already committed (callers roll back on failure).
  bool place(ProducerId p, Rational amount, std::optional<ConsumerId> exclude,
             std::vector<WeightDelta>& deltas, std::string& error);

  // Serves queued internal residual demands in ascending producer id.
  bool drain_internal(std::optional<ConsumerId> exclude, std::vector<WeightDelta>& deltas,
                      std::string& error);

  void clamp_column(ConsumerId c);
  void clamp_row(ProducerId p);
  void refresh_tight();
  HandlerOutcome finish(std::vector<WeightDelta> deltas);

  GraphState graph_;
  DualCertificate dual_;
  Rng rng_;
  std::vector<std::pair<ProducerId, Rational>> pending_internal_;
  std::uint64_t op_counter_{0};
};

}  // namespace dynassign
