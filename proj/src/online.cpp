#include "dynassign/online.hpp"

#include "dynassign/errors.hpp"

#include <algorithm>
#include <utility>

namespace dynassign {

struct OnlineState::Backup {
  GraphState graph;
  DualCertificate dual;
  Rng rng;
  std::vector<std::pair<ProducerId, Rational>> pending;
  std::uint64_t ops;
};

OnlineState::OnlineState(GraphState initial, std::uint64_t rng_seed)
    : graph_(std::move(initial)), rng_(rng_seed) {
  refresh_tight();
}

OnlineState::Backup OnlineState::save() const {
  return Backup{graph_, dual_, rng_, pending_internal_, op_counter_};
}

void OnlineState::restore(Backup&& b) {
  graph_ = std::move(b.graph);
  dual_ = std::move(b.dual);
  rng_ = b.rng;
  pending_internal_ = std::move(b.pending);
  op_counter_ = b.ops;
}

Rational OnlineState::residual_of(ConsumerId c) const { return graph_.residual_capacity(c); }

Rational OnlineState::reachable_residual(ProducerId p, std::optional<ConsumerId> exclude) const {
  Rational total = 0;
  for (const auto& cons : graph_.consumers()) {
    if (!cons.alive) continue;
    if (exclude && *exclude == cons.id) continue;
    if (!graph_.edge_usable(p, cons.id)) continue;
    total += residual_of(cons.id);
  }
  return total;
}

void OnlineState::clamp_row(ProducerId p) {
  const Rational yp = dual_.y_of(p);
  for (const auto& cons : graph_.consumers()) {
    if (!graph_.edge_usable(p, cons.id)) continue;
    Rational floor = yp - graph_.edge(p, cons.id).distance;
    if (floor > dual_.z_of(cons.id)) dual_.z[cons.id.value] = std::move(floor);
  }
}

void OnlineState::clamp_column(ConsumerId c) {
  Rational zc = dual_.z_of(c);
  for (const auto& prod : graph_.producers()) {
    if (!graph_.edge_usable(prod.id, c)) continue;
    Rational floor = dual_.y_of(prod.id) - graph_.edge(prod.id, c).distance;
    if (floor > zc) zc = std::move(floor);
  }
  if (zc > dual_.z_of(c)) dual_.z[c.value] = std::move(zc);
}

void OnlineState::refresh_tight() { dual_.recompute_tight(graph_); }

HandlerOutcome OnlineState::finish(std::vector<WeightDelta> deltas) {
  refresh_tight();
  HandlerOutcome out;
  out.weight_deltas = std::move(deltas);
  out.cost_after = graph_.objective_cost();
  return out;
}

bool OnlineState::place(ProducerId p, Rational amount, std::optional<ConsumerId> exclude,
                        std::vector<WeightDelta>& deltas, std::string& error) {
  if (amount <= 0) return true;
  {
    Rational reach = reachable_residual(p, exclude);
    if (reach < amount) {
      error = "demand " + format_rational(amount) + " for producer " + std::to_string(p.value) +
              " exceeds reachable residual capacity " + format_rational(reach);
      return false;
    }
  }

  Rational remaining = std::move(amount);
  while (remaining > 0) {
    ++op_counter_;
    // Tight edges with residual capacity absorb weight without any
    // potential movement, lowest consumer id first.
    for (const auto& cons : graph_.consumers()) {
      if (remaining <= 0) break;
      if (exclude && *exclude == cons.id) continue;
      if (!graph_.edge_usable(p, cons.id)) continue;
      if (dual_.y_of(p) - dual_.z_of(cons.id) != graph_.edge(p, cons.id).distance) continue;
      Rational res = residual_of(cons.id);
      if (res <= 0) continue;
      Rational commit = remaining < res ? remaining : res;
      graph_.add_weight(p, cons.id, commit);
      deltas.push_back({p, cons.id, commit});
      remaining -= commit;
    }
    if (remaining <= 0) break;

    // Random slack edge; its constraint is driven tight by raising y, and
    // every other constraint of this producer is kept feasible by clamping
    // the consumer potentials up (formerly tight ones ride along and stay
    // tight).
    std::vector<ConsumerId> pool;
    for (const auto& cons : graph_.consumers()) {
      if (exclude && *exclude == cons.id) continue;
      if (!graph_.edge_usable(p, cons.id)) continue;
      if (dual_.y_of(p) - dual_.z_of(cons.id) == graph_.edge(p, cons.id).distance) continue;
      if (residual_of(cons.id) <= 0) continue;
      pool.push_back(cons.id);
    }
    if (pool.empty()) {
      error = "no eligible edge left for producer " + std::to_string(p.value) + " with " +
              format_rational(remaining) + " unplaced";
      return false;
    }
    ConsumerId chosen = pool[static_cast<std::size_t>(rng_.below(pool.size()))];
    Rational delta1 = graph_.edge(p, chosen).distance - dual_.y_of(p) + dual_.z_of(chosen);
    dual_.y[p.value] = dual_.y_of(p) + delta1;
    clamp_row(p);
    Rational res = residual_of(chosen);
    Rational commit = remaining < res ? remaining : res;
    graph_.add_weight(p, chosen, commit);
    deltas.push_back({p, chosen, commit});
    remaining -= commit;
  }
  return true;
}

bool OnlineState::drain_internal(std::optional<ConsumerId> exclude,
                                 std::vector<WeightDelta>& deltas, std::string& error) {
  std::stable_sort(pending_internal_.begin(), pending_internal_.end(),
                   [](const auto& a, const auto& b) { return a.first.value < b.first.value; });
  while (!pending_internal_.empty()) {
    auto [producer, amount] = pending_internal_.front();
    pending_internal_.erase(pending_internal_.begin());
    if (!place(producer, std::move(amount), exclude, deltas, error)) return false;
  }
  return true;
}

HandlerOutcome OnlineState::handle_demand(ProducerId producer, const Rational& amount) {
  Backup backup = save();
  graph_.apply_event(DemandEvent{producer, amount});
  ++op_counter_;
  std::vector<WeightDelta> deltas;
  std::string error;
  if (!place(producer, amount, std::nullopt, deltas, error)) {
    restore(std::move(backup));
    HandlerOutcome out;
    out.cost_after = graph_.objective_cost();
    out.rejected = std::move(error);
    return out;
  }
  return finish(std::move(deltas));
}

HandlerOutcome OnlineState::handle_distance_change(ProducerId producer, ConsumerId consumer,
                                                   const Rational& new_distance) {
  graph_.apply_event(DistanceChangeEvent{producer, consumer, new_distance});
  ++op_counter_;
  // Only the changed pair can have lost feasibility; clamp its consumer
  // potential and rebuild the tight set. Weight stays where it is.
  Rational floor = dual_.y_of(producer) - new_distance;
  if (floor > dual_.z_of(consumer)) dual_.z[consumer.value] = std::move(floor);
  return finish({});
}

HandlerOutcome OnlineState::handle_producer_failure(ProducerId producer) {
  std::vector<WeightDelta> deltas;
  for (const auto& cons : graph_.consumers()) {
    Rational w = graph_.assignment().get(producer, cons.id);
    if (w > 0) deltas.push_back({producer, cons.id, -w});
  }
  graph_.apply_event(ProducerFailEvent{producer});
  ++op_counter_;
  dual_.y.erase(producer.value);
  return finish(std::move(deltas));
}

HandlerOutcome OnlineState::handle_consumer_addition(const Rational& capacity,
                                                     const std::vector<Rational>& distances) {
  graph_.apply_event(ConsumerAddEvent{capacity, distances});
  ++op_counter_;
  ConsumerId fresh{static_cast<std::uint32_t>(graph_.consumer_count() - 1)};
  clamp_column(fresh);

  std::vector<WeightDelta> deltas;
  for (const auto& prod : graph_.producers()) {
    if (!prod.alive) continue;
    Rational room = residual_of(fresh);
    if (room <= 0) break;
    // The producer's single highest-distance weighted edge, lowest
    // consumer id on ties.
    std::optional<ConsumerId> heaviest;
    Rational heaviest_d;
    for (const auto& cons : graph_.consumers()) {
      if (cons.id == fresh) continue;
      Rational w = graph_.assignment().get(prod.id, cons.id);
      if (w <= 0) continue;
      const Rational& d = graph_.edge(prod.id, cons.id).distance;
      if (!heaviest || d > heaviest_d) {
        heaviest = cons.id;
        heaviest_d = d;
      }
    }
    if (!heaviest) continue;
    const Rational& d_new = graph_.edge(prod.id, fresh).distance;
    if (!(d_new < heaviest_d)) continue;
    Rational w = graph_.assignment().get(prod.id, *heaviest);
    Rational amt = w < room ? w : room;
    graph_.remove_weight(prod.id, *heaviest, amt);
    graph_.add_weight(prod.id, fresh, amt);
    deltas.push_back({prod.id, *heaviest, -amt});
    deltas.push_back({prod.id, fresh, amt});
  }
  return finish(std::move(deltas));
}

HandlerOutcome OnlineState::handle_capacity_decrease(ConsumerId consumer,
                                                     const Rational& new_capacity) {
  const Consumer& cons = graph_.consumer(consumer);
  if (!cons.alive) {
    throw DeadTargetError("capacity decrease for dead consumer " + std::to_string(consumer.value));
  }
  if (new_capacity >= cons.capacity) {
    throw InvalidEventError("capacity decrease expects a smaller capacity");
  }
  Backup backup = save();
  Rational load = graph_.consumer_load(consumer);
  graph_.apply_event(CapacityChangeEvent{consumer, new_capacity});
  ++op_counter_;
  std::vector<WeightDelta> deltas;
  if (load > new_capacity) {
    Rational overflow = load - new_capacity;
    while (overflow > 0) {
      // Shed from the minimum-distance weighted edge, lowest producer id
      // on ties.
      std::optional<ProducerId> pick;
      Rational pick_d;
      for (const auto& prod : graph_.producers()) {
        Rational w = graph_.assignment().get(prod.id, consumer);
        if (w <= 0) continue;
        const Rational& d = graph_.edge(prod.id, consumer).distance;
        if (!pick || d < pick_d) {
          pick = prod.id;
          pick_d = d;
        }
      }
      Rational w = graph_.assignment().get(*pick, consumer);
      Rational shed = w < overflow ? w : overflow;
      graph_.remove_weight(*pick, consumer, shed);
      deltas.push_back({*pick, consumer, -shed});
      pending_internal_.emplace_back(*pick, shed);
      overflow -= shed;
    }
    std::string error;
    if (!drain_internal(consumer, deltas, error)) {
      restore(std::move(backup));
      HandlerOutcome out;
      out.cost_after = graph_.objective_cost();
      out.rejected = std::move(error);
      return out;
    }
  }
  return finish(std::move(deltas));
}

HandlerOutcome OnlineState::handle_consumer_failure(ConsumerId consumer) {
  Backup backup = save();
  std::vector<std::pair<ProducerId, Rational>> lost;
  for (const auto& prod : graph_.producers()) {
    Rational w = graph_.assignment().get(prod.id, consumer);
    if (w > 0) lost.emplace_back(prod.id, std::move(w));
  }
  graph_.apply_event(ConsumerFailEvent{consumer});
  ++op_counter_;
  dual_.z.erase(consumer.value);
  std::vector<WeightDelta> deltas;
  for (const auto& [p, w] : lost) {
    deltas.push_back({p, consumer, -w});
    pending_internal_.emplace_back(p, w);
  }
  std::string error;
  if (!drain_internal(std::nullopt, deltas, error)) {
    restore(std::move(backup));
    HandlerOutcome out;
    out.cost_after = graph_.objective_cost();
    out.rejected = std::move(error);
    return out;
  }
  return finish(std::move(deltas));
}

HandlerOutcome OnlineState::handle_edge_failure(ProducerId producer, ConsumerId consumer) {
  Backup backup = save();
  Rational w = graph_.assignment().get(producer, consumer);
  graph_.apply_event(EdgeFailEvent{producer, consumer});
  ++op_counter_;
  std::vector<WeightDelta> deltas;
  if (w > 0) {
    deltas.push_back({producer, consumer, -w});
    pending_internal_.emplace_back(producer, w);
    std::string error;
    if (!drain_internal(std::nullopt, deltas, error)) {
      restore(std::move(backup));
      HandlerOutcome out;
      out.cost_after = graph_.objective_cost();
      out.rejected = std::move(error);
      return out;
    }
  }
  return finish(std::move(deltas));
}

HandlerOutcome OnlineState::handle_event(const ServiceRequest& event) {
  struct Visitor {
    OnlineState& s;
    HandlerOutcome operator()(const DemandEvent& e) {
      return s.handle_demand(e.producer, e.amount);
    }
    HandlerOutcome operator()(const DistanceChangeEvent& e) {
      return s.handle_distance_change(e.producer, e.consumer, e.new_distance);
    }
    HandlerOutcome operator()(const EdgeFailEvent& e) {
      return s.handle_edge_failure(e.producer, e.consumer);
    }
    HandlerOutcome operator()(const EdgeRestoreEvent& e) {
      // Plumbing, no dedicated algorithm: bring the edge back and keep the
      // restored pair feasible.
      s.graph_.apply_event(e);
      ++s.op_counter_;
      Rational floor = s.dual_.y_of(e.producer) - e.distance;
      if (floor > s.dual_.z_of(e.consumer)) s.dual_.z[e.consumer.value] = std::move(floor);
      return s.finish({});
    }
    HandlerOutcome operator()(const ProducerFailEvent& e) {
      return s.handle_producer_failure(e.producer);
    }
    HandlerOutcome operator()(const ConsumerFailEvent& e) {
      return s.handle_consumer_failure(e.consumer);
    }
    HandlerOutcome operator()(const ConsumerAddEvent& e) {
      return s.handle_consumer_addition(e.capacity, e.distances);
    }
    HandlerOutcome operator()(const CapacityChangeEvent& e) {
      const Consumer& c = s.graph_.consumer(e.consumer);
      if (c.alive && e.new_capacity < c.capacity) {
        return s.handle_capacity_decrease(e.consumer, e.new_capacity);
      }
      // Increases (and no-ops) are plain mutations; dead targets throw in
      // apply_event.
      s.graph_.apply_event(e);
      ++s.op_counter_;
      return s.finish({});
    }
  };
  return std::visit(Visitor{*this}, event);
}

}  // namespace dynassign
