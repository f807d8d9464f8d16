#include "dynassign/snapshot.hpp"

namespace dynassign {

namespace {

Snapshot build(const GraphState& state, bool residual_view) {
  Snapshot snap;
  for (const auto& p : state.producers()) {
    if (!p.alive || !p.demand_consumed) continue;
    Rational remaining = p.demand;
    if (residual_view) remaining -= state.assignment().producer_total(p.id);
    if (remaining < 0) remaining = 0;  // over-service is a feasibility bug, not ours
    snap.producers.push_back({p.id, std::move(remaining)});
  }
  for (const auto& c : state.consumers()) {
    if (!c.alive) continue;
    Rational residual = c.capacity;
    if (residual_view) residual -= state.assignment().consumer_total(c.id);
    if (residual < 0) residual = 0;
    snap.consumers.push_back({c.id, std::move(residual)});
  }
  snap.distance.reserve(snap.producers.size());
  snap.usable.reserve(snap.producers.size());
  for (const auto& row : snap.producers) {
    std::vector<Rational> drow;
    std::vector<char> urow;
    drow.reserve(snap.consumers.size());
    urow.reserve(snap.consumers.size());
    for (const auto& col : snap.consumers) {
      const Edge& e = state.edge(row.id, col.id);
      drow.push_back(e.distance);
      urow.push_back(e.alive ? 1 : 0);
    }
    snap.distance.push_back(std::move(drow));
    snap.usable.push_back(std::move(urow));
  }
  if (residual_view) {
    snap.frozen = state.assignment();
    snap.frozen_cost = state.objective_cost();
  }
  return snap;
}

}  // namespace

Snapshot Snapshot::fresh(const GraphState& state) { return build(state, false); }
Snapshot Snapshot::residual(const GraphState& state) { return build(state, true); }

std::optional<std::size_t> Snapshot::row_of(ProducerId p) const {
  for (std::size_t i = 0; i < producers.size(); ++i) {
    if (producers[i].id == p) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Snapshot::col_of(ConsumerId c) const {
  for (std::size_t j = 0; j < consumers.size(); ++j) {
    if (consumers[j].id == c) return j;
  }
  return std::nullopt;
}

Rational Snapshot::total_remaining() const {
  Rational total = 0;
  for (const auto& p : producers) total += p.remaining;
  return total;
}

Rational Snapshot::total_residual() const {
  Rational total = 0;
  for (const auto& c : consumers) total += c.residual;
  return total;
}

Rational DualCertificate::y_of(ProducerId p) const {
  auto it = y.find(p.value);
  return it == y.end() ? Rational(0) : it->second;
}

Rational DualCertificate::z_of(ConsumerId c) const {
  auto it = z.find(c.value);
  return it == z.end() ? Rational(0) : it->second;
}

bool DualCertificate::tight(ProducerId p, ConsumerId c) const {
  return tight_set.count({p.value, c.value}) > 0;
}

Rational DualCertificate::dual_objective(const Snapshot& snap) const {
  Rational obj = 0;
  for (const auto& row : snap.producers) obj += y_of(row.id) * row.remaining;
  for (const auto& col : snap.consumers) obj -= z_of(col.id) * col.residual;
  return obj;
}

bool DualCertificate::feasible_for(const Snapshot& snap) const {
  for (const auto& [id, v] : y) {
    if (v < 0) return false;
    (void)id;
  }
  for (const auto& [id, v] : z) {
    if (v < 0) return false;
    (void)id;
  }
  for (std::size_t i = 0; i < snap.producers.size(); ++i) {
    for (std::size_t j = 0; j < snap.consumers.size(); ++j) {
      if (!snap.usable[i][j]) continue;
      Rational slack = snap.distance[i][j] - y_of(snap.producers[i].id) + z_of(snap.consumers[j].id);
      if (slack < 0) return false;
      bool marked = tight(snap.producers[i].id, snap.consumers[j].id);
      if (marked != (slack == 0)) return false;
    }
  }
  return true;
}

void DualCertificate::recompute_tight(const Snapshot& snap) {
  tight_set.clear();
  for (std::size_t i = 0; i < snap.producers.size(); ++i) {
    for (std::size_t j = 0; j < snap.consumers.size(); ++j) {
      if (!snap.usable[i][j]) continue;
      if (y_of(snap.producers[i].id) - z_of(snap.consumers[j].id) == snap.distance[i][j]) {
        tight_set.insert({snap.producers[i].id.value, snap.consumers[j].id.value});
      }
    }
  }
}

bool DualCertificate::feasible_for(const GraphState& graph) const {
  for (const auto& [id, v] : y) {
    if (v < 0) return false;
    (void)id;
  }
  for (const auto& [id, v] : z) {
    if (v < 0) return false;
    (void)id;
  }
  for (const auto& p : graph.producers()) {
    if (!p.alive) continue;
    for (const auto& c : graph.consumers()) {
      if (!c.alive || !graph.edge(p.id, c.id).alive) continue;
      Rational slack = graph.edge(p.id, c.id).distance - y_of(p.id) + z_of(c.id);
      if (slack < 0) return false;
      if (tight(p.id, c.id) != (slack == 0)) return false;
    }
  }
  return true;
}

void DualCertificate::recompute_tight(const GraphState& graph) {
  tight_set.clear();
  for (const auto& p : graph.producers()) {
    if (!p.alive) continue;
    for (const auto& c : graph.consumers()) {
      if (!c.alive || !graph.edge(p.id, c.id).alive) continue;
      if (y_of(p.id) - z_of(c.id) == graph.edge(p.id, c.id).distance) {
        tight_set.insert({p.id.value, c.id.value});
      }
    }
  }
}

}  // namespace dynassign
