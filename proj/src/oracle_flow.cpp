#include "dynassign/oracle.hpp"

namespace dynassign {

namespace {

// Node layout for the transportation network: producers first, then
// consumers, then source and sink.
struct Net {
  std::size_t n, m;
  std::size_t source, sink, count;
  explicit Net(const Snapshot& snap)
      : n(snap.producers.size()),
        m(snap.consumers.size()),
        source(n + m),
        sink(n + m + 1),
        count(n + m + 2) {}
  std::size_t producer(std::size_t i) const { return i; }
  std::size_t consumer(std::size_t j) const { return n + j; }
};

SolveResult finish(const Snapshot& snap, const std::vector<std::vector<Rational>>& flow,
                   SolveStatus status, std::uint64_t iterations, std::uint64_t work) {
  SolveResult result;
  result.status = status;
  result.iterations = iterations;
  result.work = work;
  result.assignment = snap.frozen;
  for (std::size_t i = 0; i < snap.producers.size(); ++i) {
    for (std::size_t j = 0; j < snap.consumers.size(); ++j) {
      if (flow[i][j] > 0) {
        result.added.add(snap.producers[i].id, snap.consumers[j].id, flow[i][j]);
        result.assignment.add(snap.producers[i].id, snap.consumers[j].id, flow[i][j]);
        result.added_cost += snap.distance[i][j] * flow[i][j];
      }
    }
  }
  result.cost = snap.frozen_cost + result.added_cost;
  return result;
}

}  // namespace

SolveResult solve_optimal(const Snapshot& snap) {
  const Net net(snap);
  std::vector<Rational> rem(net.n), res(net.m);
  Rational needed = 0;
  for (std::size_t i = 0; i < net.n; ++i) {
    rem[i] = snap.producers[i].remaining;
    needed += rem[i];
  }
  for (std::size_t j = 0; j < net.m; ++j) res[j] = snap.consumers[j].residual;

  std::vector<std::vector<Rational>> flow(net.n, std::vector<Rational>(net.m, Rational(0)));
  std::vector<Rational> phi(net.count, Rational(0));
  std::uint64_t augmentations = 0;
  std::uint64_t work = 0;

  Rational served = 0;
  while (served < needed) {
    // Dijkstra over reduced costs from the source.
    std::vector<Rational> dist(net.count, Rational(0));
    std::vector<char> reached(net.count, 0), done(net.count, 0);
    std::vector<std::size_t> parent(net.count, net.count);
    reached[net.source] = 1;

    auto relax = [&](std::size_t u, std::size_t v, const Rational& cost) {
      ++work;
      Rational cand = dist[u] + cost + phi[u] - phi[v];
      if (!reached[v] || cand < dist[v]) {
        reached[v] = 1;
        dist[v] = std::move(cand);
        parent[v] = u;
      }
    };

    for (;;) {
      std::size_t u = net.count;
      for (std::size_t v = 0; v < net.count; ++v) {
        if (reached[v] && !done[v] && (u == net.count || dist[v] < dist[u])) u = v;
      }
      if (u == net.count) break;
      done[u] = 1;
      if (u == net.source) {
        for (std::size_t i = 0; i < net.n; ++i) {
          if (rem[i] > 0) relax(u, net.producer(i), Rational(0));
        }
      } else if (u < net.n) {
        const std::size_t i = u;
        for (std::size_t j = 0; j < net.m; ++j) {
          if (snap.usable[i][j]) relax(u, net.consumer(j), snap.distance[i][j]);
        }
      } else if (u < net.n + net.m) {
        const std::size_t j = u - net.n;
        for (std::size_t i = 0; i < net.n; ++i) {
          if (flow[i][j] > 0) relax(u, net.producer(i), -snap.distance[i][j]);
        }
        if (res[j] > 0) relax(u, net.sink, Rational(0));
      }
    }

    if (!reached[net.sink]) {
      return finish(snap, flow, SolveStatus::Infeasible, augmentations, work);
    }

    for (std::size_t v = 0; v < net.count; ++v) {
      if (reached[v]) phi[v] += dist[v] < dist[net.sink] ? dist[v] : dist[net.sink];
    }

    // Bottleneck along the parent chain, then push.
    Rational bottleneck = needed - served;
    for (std::size_t v = net.sink; v != net.source; v = parent[v]) {
      std::size_t u = parent[v];
      if (u == net.source) {
        if (rem[v] < bottleneck) bottleneck = rem[v];
      } else if (v == net.sink) {
        const std::size_t j = u - net.n;
        if (res[j] < bottleneck) bottleneck = res[j];
      } else if (u >= net.n && v < net.n) {
        const std::size_t j = u - net.n;
        if (flow[v][j] < bottleneck) bottleneck = flow[v][j];
      }
    }
    for (std::size_t v = net.sink; v != net.source; v = parent[v]) {
      std::size_t u = parent[v];
      if (u == net.source) {
        rem[v] -= bottleneck;
      } else if (v == net.sink) {
        res[u - net.n] -= bottleneck;
      } else if (u < net.n) {
        flow[u][v - net.n] += bottleneck;
      } else {
        flow[v][u - net.n] -= bottleneck;
      }
    }
    served += bottleneck;
    ++augmentations;
  }

  return finish(snap, flow, SolveStatus::Optimal, augmentations, work);
}

}  // namespace dynassign
