#pragma once

#include "dynassign/errors.hpp"
#include "dynassign/rational.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dynassign {

// Ids are stable array indices for the life of a run. Ids of failed nodes
// are retired, never reused.
struct ProducerId {
  std::uint32_t value{0};
  auto operator<=>(const ProducerId&) const = default;
};

struct ConsumerId {
  std::uint32_t value{0};
  auto operator<=>(const ConsumerId&) const = default;
};

struct Producer {
  ProducerId id;
  Rational demand;           // R_i, meaningful once demand_consumed
  bool alive{true};
  bool demand_consumed{false};  // a producer generates at most one demand

  bool operator==(const Producer&) const = default;
};

struct Consumer {
  ConsumerId id;
  Rational capacity;  // M_j
  bool alive{true};

  bool operator==(const Consumer&) const = default;
};

// Dead edges are a flag, never an infinite distance; a dead edge carries no
// weight and is never eligible for assignment.
struct Edge {
  Rational distance;
  bool alive{true};

  bool operator==(const Edge&) const = default;
};

// Sparse strictly-positive weights; an absent pair means zero.
class Assignment {
 public:
  using Key = std::pair<std::uint32_t, std::uint32_t>;
  using Map = std::map<Key, Rational>;

  Rational get(ProducerId p, ConsumerId c) const;
  // Adds delta (may be negative); erases the entry when it reaches zero.
  // The result must stay nonnegative.
  void add(ProducerId p, ConsumerId c, const Rational& delta);
  void erase(ProducerId p, ConsumerId c);
  void clear() { weights_.clear(); }

  const Map& entries() const { return weights_; }
  bool empty() const { return weights_.empty(); }
  std::size_t size() const { return weights_.size(); }

  Rational producer_total(ProducerId p) const;
  Rational consumer_total(ConsumerId c) const;

  bool operator==(const Assignment&) const = default;

 private:
  Map weights_;
};

// ---------------------------------------------------------------------------
// Service requests
// ---------------------------------------------------------------------------

struct DemandEvent {
  ProducerId producer;
  Rational amount;
};
struct DistanceChangeEvent {
  ProducerId producer;
  ConsumerId consumer;
  Rational new_distance;
};
struct EdgeFailEvent {
  ProducerId producer;
  ConsumerId consumer;
};
struct EdgeRestoreEvent {
  ProducerId producer;
  ConsumerId consumer;
  Rational distance;
};
struct ProducerFailEvent {
  ProducerId producer;
};
struct ConsumerFailEvent {
  ConsumerId consumer;
};
// Distances are given for alive producers in ascending id order.
struct ConsumerAddEvent {
  Rational capacity;
  std::vector<Rational> distances;
};
struct CapacityChangeEvent {
  ConsumerId consumer;
  Rational new_capacity;
};

using ServiceRequest =
    std::variant<DemandEvent, DistanceChangeEvent, EdgeFailEvent, EdgeRestoreEvent,
                 ProducerFailEvent, ConsumerFailEvent, ConsumerAddEvent, CapacityChangeEvent>;

// Short lowercase tag, also used by the trace format.
std::string event_kind(const ServiceRequest& event);

// ---------------------------------------------------------------------------
// Feasibility reporting
// ---------------------------------------------------------------------------

struct FeasibilityViolation {
  enum class Kind { DemandMismatch, CapacityExceeded };
  Kind kind;
  std::uint32_t id;    // producer id for DemandMismatch, consumer id otherwise
  Rational magnitude;  // absolute size of the violation
};

using FeasibilityReport = std::vector<FeasibilityViolation>;

// ---------------------------------------------------------------------------
// Graph state
// ---------------------------------------------------------------------------

// The complete bipartite world: producers, consumers, dense edge matrix and
// the current weight assignment. All mutation goes through this class.
class GraphState {
 public:
  GraphState() = default;

  // Builds a complete graph with the given capacities and distances
  // (distances[p][c], one row per producer). Demands arrive later as events.
  static GraphState complete(std::size_t n_producers, std::vector<Rational> capacities,
                             std::vector<std::vector<Rational>> distances);

  ProducerId add_producer();
  ConsumerId add_consumer(const Rational& capacity, const std::vector<Rational>& distances_per_alive_producer);

  std::size_t producer_count() const { return producers_.size(); }
  std::size_t consumer_count() const { return consumers_.size(); }
  std::size_t alive_producer_count() const;
  std::size_t alive_consumer_count() const;

  const Producer& producer(ProducerId p) const;
  const Consumer& consumer(ConsumerId c) const;
  const Edge& edge(ProducerId p, ConsumerId c) const;
  const std::vector<Producer>& producers() const { return producers_; }
  const std::vector<Consumer>& consumers() const { return consumers_; }

  // True when both endpoints and the edge itself are alive.
  bool edge_usable(ProducerId p, ConsumerId c) const;

  const Assignment& assignment() const { return assignment_; }
  std::uint64_t clock() const { return clock_; }
  // Trace initial states live at clock 0 regardless of how they were built.
  void reset_clock() { clock_ = 0; }

  Rational consumer_load(ConsumerId c) const;
  // M_j minus current load; consumer must be alive.
  Rational residual_capacity(ConsumerId c) const;

  // Distance-weighted sum of all assigned weights.
  Rational objective_cost() const;

  // Lists every alive producer whose served weight differs from its consumed
  // demand and every alive consumer whose load exceeds capacity.
  FeasibilityReport check_feasibility() const;

  // Pure state mutation; algorithmic responses live in the online engine.
  // Increments the clock. On edge failure the edge weight is dropped (the
  // producer becomes under-served); on consumer failure the whole column is
  // wiped.
  void apply_event(const ServiceRequest& event);

  // Algorithmic mutators used by the solvers/engine. Both keep the
  // assignment invariants: weights strictly positive, only on usable edges,
  // and within consumer capacity.
  void add_weight(ProducerId p, ConsumerId c, const Rational& delta);
  void remove_weight(ProducerId p, ConsumerId c, const Rational& delta);

  // Set a distance directly (used by builders; events use apply_event).
  void set_distance(ProducerId p, ConsumerId c, const Rational& distance);

  // Internal consistency: every stored weight positive, on a usable edge.
  // Returns human-readable problems, empty when healthy.
  std::vector<std::string> validate_structure() const;

  bool operator==(const GraphState&) const = default;

 private:
  void require_producer(ProducerId p) const;
  void require_consumer(ConsumerId c) const;
  Edge& edge_ref(ProducerId p, ConsumerId c);

  std::vector<Producer> producers_;
  std::vector<Consumer> consumers_;
  std::vector<std::vector<Edge>> edges_;  // [producer][consumer]
  Assignment assignment_;
  std::uint64_t clock_{0};
};

// An ordered event sequence plus the state it starts from. Replaying the
// same trace with the same algorithm is bit-identical.
struct Trace {
  GraphState initial;  // assignment empty
  std::vector<ServiceRequest> events;
  std::uint64_t rng_seed{0};
};

}  // namespace dynassign
