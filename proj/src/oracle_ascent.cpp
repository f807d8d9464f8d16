#include "dynassign/errors.hpp"
#include "dynassign/oracle.hpp"

#include <algorithm>
#include <deque>
#include <utility>

namespace dynassign {

Rational benefit(ProducerId producer, const DualCertificate& cert, const Snapshot& snap) {
  auto row = snap.row_of(producer);
  if (!row) {
    throw UnknownIdError("producer " + std::to_string(producer.value) + " not in snapshot");
  }
  Rational value = snap.producers[*row].remaining;
  for (const auto& col : snap.consumers) {
    if (cert.tight(producer, col.id)) value -= col.residual;
  }
  return value;
}

bool verify_slackness(const SolveResult& result, const Snapshot& snap) {
  if (!result.certificate) {
    throw MissingCertificateError("solve result carries no dual certificate");
  }
  const DualCertificate& cert = *result.certificate;
  for (const auto& [key, w] : result.added.entries()) {
    if (w <= 0) continue;
    auto row = snap.row_of(ProducerId{key.first});
    auto col = snap.col_of(ConsumerId{key.second});
    if (!row || !col) return false;
    if (cert.y_of(ProducerId{key.first}) - cert.z_of(ConsumerId{key.second}) !=
        snap.distance[*row][*col]) {
      return false;
    }
  }
  return true;
}

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

struct OpenRequest {
  std::size_t row;
  std::int32_t index;  // -1 in single-request mode
  Rational amount;     // announced size; drives selection
  Rational open;       // still unserved
};

// Labeled-tree dual ascent over the residual transportation problem. One
// instance per solve; all state is dense over snapshot rows/cols.
class AscentEngine {
 public:
  AscentEngine(const Snapshot& snap, std::vector<OpenRequest> requests, ShareRule rule,
               const AscentOptions& opts)
      : snap_(snap),
        requests_(std::move(requests)),
        rule_(rule),
        keep_log_(opts.keep_log),
        n_(snap.producers.size()),
        m_(snap.consumers.size()),
        y_(n_, Rational(0)),
        z_(m_, Rational(0)),
        placed_(n_, std::vector<Rational>(m_, Rational(0))),
        load_(m_, Rational(0)) {}

  SolveResult run() {
    bool feasible = true;
    for (;;) {
      std::size_t pick = select();
      if (pick == requests_.size()) break;
      if (!serve(requests_[pick])) {
        feasible = false;
        break;
      }
    }
    return finish(feasible);
  }

 private:
  const Rational& cap(std::size_t j) const { return snap_.consumers[j].residual; }

  bool tight(std::size_t i, std::size_t j) const {
    return y_[i] - z_[j] == snap_.distance[i][j];
  }

  // Residual capacities of the row's tight consumers, the subtractive part
  // of the benefit value.
  Rational tight_caps(std::size_t i) const {
    Rational sum = 0;
    for (std::size_t j = 0; j < m_; ++j) {
      if (snap_.usable[i][j] && tight(i, j)) sum += cap(j);
    }
    return sum;
  }

  // Highest benefit among open requests; ties go to the lowest producer id,
  // then the lowest request position.
  std::size_t select() const {
    std::size_t best = requests_.size();
    Rational best_value;
    for (std::size_t k = 0; k < requests_.size(); ++k) {
      const OpenRequest& r = requests_[k];
      if (r.open <= 0) continue;
      Rational value = r.amount - tight_caps(r.row);
      if (best == requests_.size() || value > best_value ||
          (value == best_value &&
           snap_.producers[r.row].id.value < snap_.producers[requests_[best].row].id.value)) {
        best = k;
        best_value = std::move(value);
      }
    }
    return best;
  }

  bool serve(OpenRequest& req) {
    while (req.open > 0) {
      if (!phase(req)) return false;
    }
    return true;
  }

  // One alternating-tree phase: grow over tight edges, ascend by the
  // minimum slack until a consumer with residual capacity is reachable,
  // then augment once.
  bool phase(OpenRequest& req) {
    std::vector<char> in_p(n_, 0), in_c(m_, 0);
    std::vector<std::size_t> parent_row(n_, kNone);  // col that pulled the row in
    std::vector<std::size_t> parent_col(m_, kNone);  // row the col is tight with
    std::vector<Rational> minslack(m_, Rational(0));
    std::vector<std::size_t> minrow(m_, kNone);
    std::deque<std::size_t> scan;
    std::size_t target = kNone;

    // Adds a tight col; returns true when it still has residual capacity.
    auto add_col = [&](std::size_t j, std::size_t via_row) -> bool {
      in_c[j] = 1;
      parent_col[j] = via_row;
      if (cap(j) - load_[j] > 0) {
        target = j;
        return true;
      }
      for (std::size_t k = 0; k < n_; ++k) {
        ++work_;
        if (!in_p[k] && placed_[k][j] > 0) {
          in_p[k] = 1;
          parent_row[k] = j;
          scan.push_back(k);
        }
      }
      return false;
    };

    in_p[req.row] = 1;
    scan.push_back(req.row);

    while (target == kNone) {
      while (!scan.empty() && target == kNone) {
        std::size_t i = scan.front();
        scan.pop_front();
        for (std::size_t j = 0; j < m_; ++j) {
          if (!snap_.usable[i][j] || in_c[j]) continue;
          ++work_;
          Rational slack = snap_.distance[i][j] - y_[i] + z_[j];
          if (slack == 0) {
            if (add_col(j, i)) break;
          } else if (minrow[j] == kNone || slack < minslack[j]) {
            minslack[j] = std::move(slack);
            minrow[j] = i;
          }
        }
      }
      if (target != kNone) break;

      std::size_t jmin = kNone;
      for (std::size_t j = 0; j < m_; ++j) {
        ++work_;
        if (in_c[j] || minrow[j] == kNone) continue;
        if (jmin == kNone || minslack[j] < minslack[jmin]) jmin = j;
      }
      if (jmin == kNone) return false;  // tree exhausted: demand unservable

      Rational delta = minslack[jmin];
      ascend(req, delta, jmin, in_p, in_c);
      for (std::size_t j = 0; j < m_; ++j) {
        if (!in_c[j] && minrow[j] != kNone) minslack[j] -= delta;
      }
      for (std::size_t j = 0; j < m_ && target == kNone; ++j) {
        if (!in_c[j] && minrow[j] != kNone && minslack[j] == 0) add_col(j, minrow[j]);
      }
    }

    augment(req, target, parent_row, parent_col);
    return true;
  }

  // Raises all tree potentials by delta, split into micro-steps attributed
  // to the producer's open requests. The split fixes the intermediate
  // trajectory only; the total is always exactly delta.
  void ascend(const OpenRequest& req, const Rational& delta, std::size_t tight_col,
              const std::vector<char>& in_p, const std::vector<char>& in_c) {
    std::vector<std::pair<std::int32_t, Rational>> micro;
    if (req.index < 0) {
      micro.emplace_back(-1, delta);
    } else {
      Rational total_weight = 0;
      std::vector<std::pair<std::int32_t, Rational>> weights;
      const Rational residual_at_tight = cap(tight_col) - load_[tight_col];
      for (const OpenRequest& r : requests_) {
        if (r.row != req.row || r.open <= 0) continue;
        Rational w;
        if (rule_ == ShareRule::DemandShare) {
          w = r.amount;
        } else if (residual_at_tight > 0) {
          w = r.amount / residual_at_tight;
          if (w > 1) w = 1;
        } else {
          w = 1;
        }
        total_weight += w;
        weights.emplace_back(r.index, std::move(w));
      }
      for (auto& [idx, w] : weights) micro.emplace_back(idx, delta * w / total_weight);
    }
    for (const auto& [idx, step] : micro) {
      for (std::size_t i = 0; i < n_; ++i) {
        if (in_p[i]) y_[i] += step;
      }
      for (std::size_t j = 0; j < m_; ++j) {
        if (in_c[j]) z_[j] += step;
      }
      record("ascend", req.row, idx, step);
    }
    ++iterations_;
  }

  // Pushes flow along the alternating path from the tree root to the
  // target: forward edges gain weight, backward edges shed it, interior
  // consumer loads cancel out.
  void augment(OpenRequest& req, std::size_t target, const std::vector<std::size_t>& parent_row,
               const std::vector<std::size_t>& parent_col) {
    Rational bottleneck = req.open;
    {
      Rational res = cap(target) - load_[target];
      if (res < bottleneck) bottleneck = res;
    }
    for (std::size_t j = target;;) {
      std::size_t i = parent_col[j];
      if (i == req.row) break;
      std::size_t back = parent_row[i];
      if (placed_[i][back] < bottleneck) bottleneck = placed_[i][back];
      j = back;
    }
    for (std::size_t j = target;;) {
      std::size_t i = parent_col[j];
      placed_[i][j] += bottleneck;
      load_[j] += bottleneck;
      primal_cost_ += snap_.distance[i][j] * bottleneck;
      if (i == req.row) break;
      std::size_t back = parent_row[i];
      placed_[i][back] -= bottleneck;
      load_[back] -= bottleneck;
      primal_cost_ -= snap_.distance[i][back] * bottleneck;
      j = back;
    }
    req.open -= bottleneck;
    ++iterations_;
    record("augment", req.row, req.index, bottleneck);
  }

  void record(const char* action, std::size_t row, std::int32_t request, const Rational& delta) {
    if (!keep_log_) return;
    IterationRecord rec;
    rec.index = log_.size();
    rec.action = action;
    rec.producer = snap_.producers[row].id.value;
    rec.request = request;
    rec.delta = delta;
    Rational dual = 0;
    for (std::size_t i = 0; i < n_; ++i) dual += y_[i] * snap_.producers[i].remaining;
    for (std::size_t j = 0; j < m_; ++j) dual -= z_[j] * cap(j);
    rec.dual_objective = std::move(dual);
    rec.primal_cost = primal_cost_;
    bool feasible = true;
    bool on_tight = true;
    for (std::size_t i = 0; i < n_ && feasible; ++i) {
      if (y_[i] < 0) feasible = false;
      for (std::size_t j = 0; j < m_; ++j) {
        if (!snap_.usable[i][j]) continue;
        if (y_[i] - z_[j] > snap_.distance[i][j]) {
          feasible = false;
          break;
        }
        if (placed_[i][j] > 0 && !tight(i, j)) on_tight = false;
      }
    }
    for (std::size_t j = 0; j < m_ && feasible; ++j) {
      if (z_[j] < 0) feasible = false;
    }
    rec.dual_feasible = feasible;
    rec.weights_on_tight_edges = on_tight;
    log_.push_back(std::move(rec));
  }

  SolveResult finish(bool feasible) {
    SolveResult result;
    result.status = feasible ? SolveStatus::Optimal : SolveStatus::Infeasible;
    result.assignment = snap_.frozen;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < m_; ++j) {
        if (placed_[i][j] > 0) {
          result.added.add(snap_.producers[i].id, snap_.consumers[j].id, placed_[i][j]);
          result.assignment.add(snap_.producers[i].id, snap_.consumers[j].id, placed_[i][j]);
        }
      }
    }
    result.added_cost = primal_cost_;
    result.cost = snap_.frozen_cost + primal_cost_;
    DualCertificate cert;
    for (std::size_t i = 0; i < n_; ++i) cert.y[snap_.producers[i].id.value] = y_[i];
    for (std::size_t j = 0; j < m_; ++j) cert.z[snap_.consumers[j].id.value] = z_[j];
    cert.recompute_tight(snap_);
    result.certificate = std::move(cert);
    result.iterations = iterations_;
    result.work = work_;
    result.log = std::move(log_);
    return result;
  }

  const Snapshot& snap_;
  std::vector<OpenRequest> requests_;
  ShareRule rule_;
  bool keep_log_;
  std::size_t n_, m_;
  std::vector<Rational> y_, z_;
  std::vector<std::vector<Rational>> placed_;
  std::vector<Rational> load_;
  Rational primal_cost_{0};
  std::uint64_t iterations_{0};
  std::uint64_t work_{0};
  std::vector<IterationRecord> log_;
};

}  // namespace

SolveResult primal_dual_offline(const Snapshot& snap, const AscentOptions& opts) {
  std::vector<OpenRequest> requests;
  for (std::size_t i = 0; i < snap.producers.size(); ++i) {
    const Rational& remaining = snap.producers[i].remaining;
    if (remaining > 0) requests.push_back({i, -1, remaining, remaining});
  }
  return AscentEngine(snap, std::move(requests), ShareRule::DemandShare, opts).run();
}

SolveResult primal_dual_multi_request(const Snapshot& snap,
                                      const std::vector<std::pair<ProducerId, Rational>>& requests,
                                      ShareRule rule, const AscentOptions& opts) {
  Snapshot adjusted = snap;
  for (auto& row : adjusted.producers) row.remaining = 0;
  std::vector<std::pair<std::size_t, Rational>> located;
  located.reserve(requests.size());
  for (const auto& [producer, amount] : requests) {
    auto row = adjusted.row_of(producer);
    if (!row) {
      throw UnknownIdError("producer " + std::to_string(producer.value) + " not in snapshot");
    }
    if (amount < 0) throw DomainError("request amount must be nonnegative");
    adjusted.producers[*row].remaining += amount;
    located.emplace_back(*row, amount);
  }
  std::vector<OpenRequest> open;
  open.reserve(located.size());
  for (std::size_t k = 0; k < located.size(); ++k) {
    open.push_back(
        {located[k].first, static_cast<std::int32_t>(k), located[k].second, located[k].second});
  }
  return AscentEngine(adjusted, std::move(open), rule, opts).run();
}

}  // namespace dynassign
