#include "dynassign/model.hpp"

#include <sstream>

namespace dynassign {

namespace {

std::string id_text(const char* what, std::uint32_t v) {
  std::ostringstream os;
  os << what << " " << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Assignment
// ---------------------------------------------------------------------------

Rational Assignment::get(ProducerId p, ConsumerId c) const {
  auto it = weights_.find({p.value, c.value});
  return it == weights_.end() ? Rational(0) : it->second;
}

void Assignment::add(ProducerId p, ConsumerId c, const Rational& delta) {
  Key key{p.value, c.value};
  auto it = weights_.find(key);
  Rational next = (it == weights_.end() ? Rational(0) : it->second) + delta;
  if (next < 0) {
    throw DomainError("assignment weight would become negative on edge (" +
                      std::to_string(p.value) + "," + std::to_string(c.value) + ")");
  }
  if (next == 0) {
    if (it != weights_.end()) weights_.erase(it);
    return;
  }
  if (it == weights_.end()) {
    weights_.emplace(key, std::move(next));
  } else {
    it->second = std::move(next);
  }
}

void Assignment::erase(ProducerId p, ConsumerId c) { weights_.erase({p.value, c.value}); }

Rational Assignment::producer_total(ProducerId p) const {
  Rational total = 0;
  auto it = weights_.lower_bound({p.value, 0});
  for (; it != weights_.end() && it->first.first == p.value; ++it) total += it->second;
  return total;
}

Rational Assignment::consumer_total(ConsumerId c) const {
  Rational total = 0;
  for (const auto& [key, w] : weights_) {
    if (key.second == c.value) total += w;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------------

std::string event_kind(const ServiceRequest& event) {
  struct Visitor {
    std::string operator()(const DemandEvent&) const { return "demand"; }
    std::string operator()(const DistanceChangeEvent&) const { return "distance_change"; }
    std::string operator()(const EdgeFailEvent&) const { return "edge_fail"; }
    std::string operator()(const EdgeRestoreEvent&) const { return "edge_restore"; }
    std::string operator()(const ProducerFailEvent&) const { return "producer_fail"; }
    std::string operator()(const ConsumerFailEvent&) const { return "consumer_fail"; }
    std::string operator()(const ConsumerAddEvent&) const { return "consumer_add"; }
    std::string operator()(const CapacityChangeEvent&) const { return "capacity_change"; }
  };
  return std::visit(Visitor{}, event);
}

// ---------------------------------------------------------------------------
// GraphState
// ---------------------------------------------------------------------------

GraphState GraphState::complete(std::size_t n_producers, std::vector<Rational> capacities,
                                std::vector<std::vector<Rational>> distances) {
  if (distances.size() != n_producers) {
    throw DomainError("distance matrix needs one row per producer");
  }
  GraphState g;
  g.consumers_.reserve(capacities.size());
  for (std::uint32_t j = 0; j < capacities.size(); ++j) {
    if (capacities[j] < 0) throw DomainError("capacity must be nonnegative");
    g.consumers_.push_back(Consumer{ConsumerId{j}, std::move(capacities[j]), true});
  }
  g.producers_.reserve(n_producers);
  g.edges_.reserve(n_producers);
  for (std::uint32_t i = 0; i < n_producers; ++i) {
    if (distances[i].size() != g.consumers_.size()) {
      throw DomainError("distance row " + std::to_string(i) + " has wrong length");
    }
    g.producers_.push_back(Producer{ProducerId{i}, Rational(0), true, false});
    std::vector<Edge> row;
    row.reserve(distances[i].size());
    for (auto& d : distances[i]) {
      if (d < 0) throw DomainError("distance must be nonnegative");
      row.push_back(Edge{std::move(d), true});
    }
    g.edges_.push_back(std::move(row));
  }
  return g;
}

ProducerId GraphState::add_producer() {
  ProducerId id{static_cast<std::uint32_t>(producers_.size())};
  producers_.push_back(Producer{id, Rational(0), true, false});
  std::vector<Edge> row;
  row.reserve(consumers_.size());
  for (std::size_t j = 0; j < consumers_.size(); ++j) row.push_back(Edge{Rational(0), false});
  edges_.push_back(std::move(row));
  return id;
}

ConsumerId GraphState::add_consumer(const Rational& capacity,
                                    const std::vector<Rational>& distances_per_alive_producer) {
  if (capacity < 0) throw DomainError("capacity must be nonnegative");
  if (distances_per_alive_producer.size() != alive_producer_count()) {
    throw ArityMismatchError("consumer_add carries " +
                             std::to_string(distances_per_alive_producer.size()) +
                             " distances for " + std::to_string(alive_producer_count()) +
                             " alive producers");
  }
  ConsumerId id{static_cast<std::uint32_t>(consumers_.size())};
  consumers_.push_back(Consumer{id, capacity, true});
  std::size_t next = 0;
  for (std::size_t i = 0; i < producers_.size(); ++i) {
    if (producers_[i].alive) {
      const Rational& d = distances_per_alive_producer[next++];
      if (d < 0) throw DomainError("distance must be nonnegative");
      edges_[i].push_back(Edge{d, true});
    } else {
      edges_[i].push_back(Edge{Rational(0), false});
    }
  }
  return id;
}

std::size_t GraphState::alive_producer_count() const {
  std::size_t n = 0;
  for (const auto& p : producers_)
    if (p.alive) ++n;
  return n;
}

std::size_t GraphState::alive_consumer_count() const {
  std::size_t n = 0;
  for (const auto& c : consumers_)
    if (c.alive) ++n;
  return n;
}

const Producer& GraphState::producer(ProducerId p) const {
  require_producer(p);
  return producers_[p.value];
}

const Consumer& GraphState::consumer(ConsumerId c) const {
  require_consumer(c);
  return consumers_[c.value];
}

const Edge& GraphState::edge(ProducerId p, ConsumerId c) const {
  require_producer(p);
  require_consumer(c);
  return edges_[p.value][c.value];
}

Edge& GraphState::edge_ref(ProducerId p, ConsumerId c) {
  require_producer(p);
  require_consumer(c);
  return edges_[p.value][c.value];
}

bool GraphState::edge_usable(ProducerId p, ConsumerId c) const {
  require_producer(p);
  require_consumer(c);
  return producers_[p.value].alive && consumers_[c.value].alive && edges_[p.value][c.value].alive;
}

Rational GraphState::consumer_load(ConsumerId c) const {
  require_consumer(c);
  return assignment_.consumer_total(c);
}

Rational GraphState::residual_capacity(ConsumerId c) const {
  require_consumer(c);
  if (!consumers_[c.value].alive) {
    throw DeadTargetError(id_text("residual of dead consumer", c.value));
  }
  return consumers_[c.value].capacity - assignment_.consumer_total(c);
}

Rational GraphState::objective_cost() const {
  Rational cost = 0;
  for (const auto& [key, w] : assignment_.entries()) {
    cost += edges_[key.first][key.second].distance * w;
  }
  return cost;
}

FeasibilityReport GraphState::check_feasibility() const {
  FeasibilityReport report;
  for (const auto& p : producers_) {
    if (!p.alive || !p.demand_consumed) continue;
    Rational served = assignment_.producer_total(p.id);
    if (served != p.demand) {
      report.push_back(FeasibilityViolation{FeasibilityViolation::Kind::DemandMismatch, p.id.value,
                                            abs(p.demand - served)});
    }
  }
  for (const auto& c : consumers_) {
    if (!c.alive) continue;
    Rational load = assignment_.consumer_total(c.id);
    if (load > c.capacity) {
      report.push_back(FeasibilityViolation{FeasibilityViolation::Kind::CapacityExceeded,
                                            c.id.value, load - c.capacity});
    }
  }
  return report;
}

void GraphState::apply_event(const ServiceRequest& event) {
  struct Visitor {
    GraphState& g;

    void operator()(const DemandEvent& e) {
      g.require_producer(e.producer);
      Producer& p = g.producers_[e.producer.value];
      if (!p.alive) throw DeadTargetError(id_text("demand for dead producer", e.producer.value));
      if (p.demand_consumed) {
        throw InvalidEventError(id_text("second demand for producer", e.producer.value));
      }
      if (e.amount < 0) throw InvalidEventError("demand amount must be nonnegative");
      p.demand = e.amount;
      p.demand_consumed = true;
    }

    void operator()(const DistanceChangeEvent& e) {
      if (!g.edge_usable(e.producer, e.consumer)) {
        throw DeadTargetError("distance change on unusable edge (" +
                              std::to_string(e.producer.value) + "," +
                              std::to_string(e.consumer.value) + ")");
      }
      if (e.new_distance < 0) throw InvalidEventError("distance must be nonnegative");
      g.edges_[e.producer.value][e.consumer.value].distance = e.new_distance;
    }

    void operator()(const EdgeFailEvent& e) {
      g.require_producer(e.producer);
      g.require_consumer(e.consumer);
      Edge& edge = g.edges_[e.producer.value][e.consumer.value];
      if (!edge.alive) {
        throw DeadTargetError("edge (" + std::to_string(e.producer.value) + "," +
                              std::to_string(e.consumer.value) + ") already failed");
      }
      edge.alive = false;
      g.assignment_.erase(e.producer, e.consumer);
    }

    void operator()(const EdgeRestoreEvent& e) {
      g.require_producer(e.producer);
      g.require_consumer(e.consumer);
      if (!g.producers_[e.producer.value].alive || !g.consumers_[e.consumer.value].alive) {
        throw DeadTargetError("edge restore with a dead endpoint");
      }
      Edge& edge = g.edges_[e.producer.value][e.consumer.value];
      if (edge.alive) {
        throw InvalidEventError("edge (" + std::to_string(e.producer.value) + "," +
                                std::to_string(e.consumer.value) + ") is not failed");
      }
      if (e.distance < 0) throw InvalidEventError("distance must be nonnegative");
      edge.alive = true;
      edge.distance = e.distance;
    }

    void operator()(const ProducerFailEvent& e) {
      g.require_producer(e.producer);
      Producer& p = g.producers_[e.producer.value];
      if (!p.alive) throw DeadTargetError(id_text("producer already failed:", e.producer.value));
      p.alive = false;
      for (std::uint32_t j = 0; j < g.consumers_.size(); ++j) {
        g.assignment_.erase(e.producer, ConsumerId{j});
      }
    }

    void operator()(const ConsumerFailEvent& e) {
      g.require_consumer(e.consumer);
      Consumer& c = g.consumers_[e.consumer.value];
      if (!c.alive) throw DeadTargetError(id_text("consumer already failed:", e.consumer.value));
      c.alive = false;
      for (std::uint32_t i = 0; i < g.producers_.size(); ++i) {
        g.assignment_.erase(ProducerId{i}, e.consumer);
      }
    }

    void operator()(const ConsumerAddEvent& e) { g.add_consumer(e.capacity, e.distances); }

    void operator()(const CapacityChangeEvent& e) {
      g.require_consumer(e.consumer);
      Consumer& c = g.consumers_[e.consumer.value];
      if (!c.alive) {
        throw DeadTargetError(id_text("capacity change for dead consumer", e.consumer.value));
      }
      if (e.new_capacity < 0) throw InvalidEventError("capacity must be nonnegative");
      c.capacity = e.new_capacity;
    }
  };
  std::visit(Visitor{*this}, event);
  ++clock_;
}

void GraphState::add_weight(ProducerId p, ConsumerId c, const Rational& delta) {
  if (delta <= 0) throw DomainError("add_weight needs a positive delta");
  if (!edge_usable(p, c)) {
    throw DomainError("add_weight on unusable edge (" + std::to_string(p.value) + "," +
                      std::to_string(c.value) + ")");
  }
  if (assignment_.consumer_total(c) + delta > consumers_[c.value].capacity) {
    throw DomainError(id_text("add_weight would overflow consumer", c.value));
  }
  assignment_.add(p, c, delta);
}

void GraphState::remove_weight(ProducerId p, ConsumerId c, const Rational& delta) {
  if (delta <= 0) throw DomainError("remove_weight needs a positive delta");
  if (assignment_.get(p, c) < delta) {
    throw DomainError("remove_weight exceeds current weight on edge (" + std::to_string(p.value) +
                      "," + std::to_string(c.value) + ")");
  }
  assignment_.add(p, c, -delta);
}

void GraphState::set_distance(ProducerId p, ConsumerId c, const Rational& distance) {
  if (distance < 0) throw DomainError("distance must be nonnegative");
  edge_ref(p, c).distance = distance;
}

std::vector<std::string> GraphState::validate_structure() const {
  std::vector<std::string> problems;
  if (edges_.size() != producers_.size()) {
    problems.push_back("edge matrix row count mismatch");
    return problems;
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i].size() != consumers_.size()) {
      problems.push_back("edge row " + std::to_string(i) + " has wrong length");
    }
  }
  if (!problems.empty()) return problems;
  for (const auto& [key, w] : assignment_.entries()) {
    auto [pi, ci] = key;
    std::string edge_name = "(" + std::to_string(pi) + "," + std::to_string(ci) + ")";
    if (pi >= producers_.size() || ci >= consumers_.size()) {
      problems.push_back("weight on out-of-range edge " + edge_name);
      continue;
    }
    if (w <= 0) problems.push_back("nonpositive weight on edge " + edge_name);
    if (!producers_[pi].alive || !consumers_[ci].alive || !edges_[pi][ci].alive) {
      problems.push_back("weight on unusable edge " + edge_name);
    }
  }
  return problems;
}

void GraphState::require_producer(ProducerId p) const {
  if (p.value >= producers_.size()) throw UnknownIdError(id_text("unknown producer", p.value));
}

void GraphState::require_consumer(ConsumerId c) const {
  if (c.value >= consumers_.size()) throw UnknownIdError(id_text("unknown consumer", c.value));
}

}  // namespace dynassign
