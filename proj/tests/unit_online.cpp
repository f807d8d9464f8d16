#include "dynassign/errors.hpp"
#include "dynassign/online.hpp"
#include "dynassign/oracle.hpp"
#include "dynassign/rng.hpp"

#include <doctest.h>

#include <map>

using namespace dynassign;

namespace {

GraphState two_by_two() {
  return GraphState::complete(2, {Rational(5), Rational(10)},
                              {{Rational(1), Rational(3)}, {Rational(2), Rational(1)}});
}

// The 2x2 state after both demands were served at minimum cost: 4 units on
// (0,0), 6 units on (1,1), cost 10.
GraphState solved_two_by_two(const Rational& cap0 = Rational(5)) {
  GraphState g = GraphState::complete(2, {cap0, Rational(10)},
                                      {{Rational(1), Rational(3)}, {Rational(2), Rational(1)}});
  g.apply_event(DemandEvent{ProducerId{0}, Rational(4)});
  g.apply_event(DemandEvent{ProducerId{1}, Rational(6)});
  g.add_weight(ProducerId{0}, ConsumerId{0}, Rational(4));
  g.add_weight(ProducerId{1}, ConsumerId{1}, Rational(6));
  return g;
}

bool dual_ok(const OnlineState& s) { return s.dual().feasible_for(s.graph()); }

}  // namespace

TEST_CASE("demand with a single eligible consumer is seed independent") {
  for (std::uint64_t seed : {0ull, 1ull, 17ull, 99ull}) {
    OnlineState s(GraphState::complete(1, {Rational(10)}, {{Rational(3)}}), seed);
    auto out = s.handle_event(DemandEvent{ProducerId{0}, Rational(5)});
    CHECK_FALSE(out.rejected.has_value());
    CHECK(out.cost_after == 15);
    CHECK(s.graph().assignment().get(ProducerId{0}, ConsumerId{0}) == 5);
    CHECK(s.dual().y_of(ProducerId{0}) == 3);
    CHECK(dual_ok(s));
  }
}

TEST_CASE("zero demand is a no-op outcome") {
  OnlineState s(GraphState::complete(1, {Rational(10)}, {{Rational(3)}}), 4);
  auto out = s.handle_event(DemandEvent{ProducerId{0}, Rational(0)});
  CHECK_FALSE(out.rejected.has_value());
  CHECK(out.weight_deltas.empty());
  CHECK(out.cost_after == 0);
  CHECK(s.graph().producer(ProducerId{0}).demand_consumed);
}

TEST_CASE("demand splits across consumers when the first draw saturates") {
  // One producer, demand 8, capacities 5 and 10 at distances 1 and 2. The
  // first random draw decides the shape: starting at the small consumer
  // forces the spill 5 + 3; starting at the big one places all 8 there.
  int small_first = 0, big_first = 0;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    OnlineState s(GraphState::complete(1, {Rational(5), Rational(10)},
                                       {{Rational(1), Rational(2)}}),
                  seed);
    auto out = s.handle_event(DemandEvent{ProducerId{0}, Rational(8)});
    REQUIRE_FALSE(out.rejected.has_value());
    const Assignment& a = s.graph().assignment();
    if (a.get(ProducerId{0}, ConsumerId{0}) == 5) {
      ++small_first;
      CHECK(a.get(ProducerId{0}, ConsumerId{1}) == 3);
      CHECK(out.cost_after == 11);
      CHECK(s.dual().y_of(ProducerId{0}) == 2);
      CHECK(s.dual().z_of(ConsumerId{0}) == 1);
    } else {
      ++big_first;
      CHECK(a.get(ProducerId{0}, ConsumerId{1}) == 8);
      CHECK(out.cost_after == 16);
      CHECK(s.dual().y_of(ProducerId{0}) == 2);
      // the row clamp drags the small consumer's potential up with y
      CHECK(s.dual().z_of(ConsumerId{0}) == 1);
    }
    CHECK(dual_ok(s));
    // every committed weight sits on a tight constraint at exit
    for (const auto& d : out.weight_deltas) {
      CHECK(s.dual().tight(d.producer, d.consumer));
    }
  }
  CHECK(small_first > 0);
  CHECK(big_first > 0);
}

TEST_CASE("infeasible demand is rejected atomically") {
  OnlineState s(two_by_two(), 21);
  OnlineState before = s;
  auto out = s.handle_event(DemandEvent{ProducerId{0}, Rational(99)});
  REQUIRE(out.rejected.has_value());
  CHECK(out.weight_deltas.empty());
  CHECK(out.cost_after == 0);
  CHECK(s.graph() == before.graph());
  CHECK(s.dual() == before.dual());
  CHECK_FALSE(s.graph().producer(ProducerId{0}).demand_consumed);
  CHECK(s.op_counter() == before.op_counter());

  // the RNG was restored too: both engines continue identically
  auto a = s.handle_event(DemandEvent{ProducerId{0}, Rational(4)});
  auto b = before.handle_event(DemandEvent{ProducerId{0}, Rational(4)});
  CHECK(a.cost_after == b.cost_after);
  CHECK(s.graph() == before.graph());
}

TEST_CASE("distance changes move cost but never weight") {
  OnlineState s(solved_two_by_two(), 3);
  Rational cost0 = s.graph().objective_cost();

  SUBCASE("unweighted slack edge") {
    auto out = s.handle_event(DistanceChangeEvent{ProducerId{0}, ConsumerId{1}, Rational(5)});
    CHECK(out.cost_after == cost0);
    CHECK(out.weight_deltas.empty());
    CHECK(dual_ok(s));
  }
  SUBCASE("weighted edge, distance up") {
    auto out = s.handle_event(DistanceChangeEvent{ProducerId{0}, ConsumerId{0}, Rational(3)});
    CHECK(out.cost_after == cost0 + 8);
    CHECK(s.graph().assignment().get(ProducerId{0}, ConsumerId{0}) == 4);
    CHECK(dual_ok(s));
  }
  SUBCASE("weighted edge, distance down") {
    auto out = s.handle_event(DistanceChangeEvent{ProducerId{1}, ConsumerId{1}, Rational(1, 2)});
    CHECK(out.cost_after == cost0 - 3);
    CHECK(dual_ok(s));
  }
}

TEST_CASE("producer failure frees capacity without reassignment") {
  OnlineState s(solved_two_by_two(), 8);
  auto out = s.handle_event(ProducerFailEvent{ProducerId{0}});
  CHECK_FALSE(out.rejected.has_value());
  CHECK(out.cost_after == 6);
  CHECK(s.graph().residual_capacity(ConsumerId{0}) == 5);
  REQUIRE(out.weight_deltas.size() == 1);
  CHECK(out.weight_deltas[0].delta == -4);
  CHECK(dual_ok(s));
  CHECK_THROWS_AS(s.handle_event(ProducerFailEvent{ProducerId{0}}), DeadTargetError);

  OnlineState idle(two_by_two(), 8);
  auto quiet = idle.handle_event(ProducerFailEvent{ProducerId{1}});
  CHECK(quiet.weight_deltas.empty());
  CHECK(quiet.cost_after == 0);
}

TEST_CASE("consumer failure re-places displaced weight atomically") {
  SUBCASE("no spare capacity: rejected, state untouched") {
    OnlineState s(solved_two_by_two(), 5);
    GraphState before = s.graph();
    auto out = s.handle_event(ConsumerFailEvent{ConsumerId{1}});
    REQUIRE(out.rejected.has_value());
    CHECK(s.graph() == before);
    CHECK(s.graph().consumer(ConsumerId{1}).alive);
    CHECK(s.pending_internal().empty());
  }
  SUBCASE("spare capacity on the other consumer") {
    OnlineState s(solved_two_by_two(Rational(20)), 5);
    auto out = s.handle_event(ConsumerFailEvent{ConsumerId{1}});
    REQUIRE_FALSE(out.rejected.has_value());
    CHECK(out.cost_after == 16);
    CHECK(s.graph().assignment().get(ProducerId{1}, ConsumerId{0}) == 6);
    CHECK_FALSE(s.graph().consumer(ConsumerId{1}).alive);
    CHECK(s.pending_internal().empty());
    CHECK(dual_ok(s));
    // conservation: total weight unchanged by the re-placement
    Rational total;
    for (const auto& [key, w] : s.graph().assignment().entries()) total += w;
    CHECK(total == 10);
  }
  SUBCASE("idle consumer only flips the alive flag") {
    OnlineState s(two_by_two(), 5);
    auto out = s.handle_event(ConsumerFailEvent{ConsumerId{0}});
    CHECK_FALSE(out.rejected.has_value());
    CHECK(out.weight_deltas.empty());
    CHECK_FALSE(s.graph().consumer(ConsumerId{0}).alive);
  }
}

TEST_CASE("edge failure re-places its weight over remaining edges") {
  SUBCASE("one alternative with room") {
    GraphState g =
        GraphState::complete(1, {Rational(5), Rational(10)}, {{Rational(1), Rational(2)}});
    g.apply_event(DemandEvent{ProducerId{0}, Rational(5)});
    g.add_weight(ProducerId{0}, ConsumerId{0}, Rational(5));
    OnlineState s(std::move(g), 2);
    auto out = s.handle_event(EdgeFailEvent{ProducerId{0}, ConsumerId{0}});
    REQUIRE_FALSE(out.rejected.has_value());
    CHECK(s.graph().assignment().get(ProducerId{0}, ConsumerId{1}) == 5);
    CHECK(out.cost_after == 10);
    CHECK(dual_ok(s));
  }
  SUBCASE("zero-weight edge leaves no residuals") {
    OnlineState s(two_by_two(), 2);
    auto out = s.handle_event(EdgeFailEvent{ProducerId{0}, ConsumerId{1}});
    CHECK_FALSE(out.rejected.has_value());
    CHECK(out.weight_deltas.empty());
  }
  SUBCASE("no remaining capacity: rejected") {
    OnlineState s(GraphState::complete(1, {Rational(5)}, {{Rational(1)}}), 2);
    s.handle_event(DemandEvent{ProducerId{0}, Rational(5)});
    GraphState before = s.graph();
    auto out = s.handle_event(EdgeFailEvent{ProducerId{0}, ConsumerId{0}});
    REQUIRE(out.rejected.has_value());
    CHECK(s.graph() == before);
  }
}

TEST_CASE("consumer addition transfers only strictly improving weight") {
  SUBCASE("no improvement: assignment unchanged") {
    OnlineState s(solved_two_by_two(), 6);
    auto out = s.handle_event(ConsumerAddEvent{Rational(10), {Rational(1), Rational(1)}});
    CHECK(out.weight_deltas.empty());
    CHECK(out.cost_after == 10);
    CHECK(s.graph().consumer_count() == 3);
    CHECK(dual_ok(s));
  }
  SUBCASE("strictly shorter edge pulls the heaviest weight over") {
    GraphState g = GraphState::complete(1, {Rational(5)}, {{Rational(3)}});
    g.apply_event(DemandEvent{ProducerId{0}, Rational(4)});
    g.add_weight(ProducerId{0}, ConsumerId{0}, Rational(4));
    OnlineState s(std::move(g), 6);
    auto out = s.handle_event(ConsumerAddEvent{Rational(10), {Rational(1)}});
    CHECK_FALSE(out.rejected.has_value());
    CHECK(out.cost_after == 4);  // was 12, drops by 8
    CHECK(s.graph().assignment().get(ProducerId{0}, ConsumerId{1}) == 4);
    CHECK(s.graph().assignment().get(ProducerId{0}, ConsumerId{0}) == 0);
    CHECK(dual_ok(s));
  }
  SUBCASE("capacity binds: lowest producer id wins") {
    GraphState g = GraphState::complete(2, {Rational(8)}, {{Rational(3)}, {Rational(3)}});
    g.apply_event(DemandEvent{ProducerId{0}, Rational(4)});
    g.apply_event(DemandEvent{ProducerId{1}, Rational(4)});
    g.add_weight(ProducerId{0}, ConsumerId{0}, Rational(4));
    g.add_weight(ProducerId{1}, ConsumerId{0}, Rational(4));
    OnlineState s(std::move(g), 6);
    auto out = s.handle_event(ConsumerAddEvent{Rational(4), {Rational(1), Rational(1)}});
    CHECK_FALSE(out.rejected.has_value());
    CHECK(s.graph().assignment().get(ProducerId{0}, ConsumerId{1}) == 4);
    CHECK(s.graph().assignment().get(ProducerId{1}, ConsumerId{1}) == 0);
    CHECK(s.graph().assignment().get(ProducerId{1}, ConsumerId{0}) == 4);
    CHECK(out.cost_after == 4 + 12);
  }
  SUBCASE("wrong arity throws and changes nothing") {
    OnlineState s(two_by_two(), 6);
    GraphState before = s.graph();
    CHECK_THROWS_AS(s.handle_event(ConsumerAddEvent{Rational(4), {Rational(1)}}),
                    ArityMismatchError);
    CHECK(s.graph() == before);
  }
}

TEST_CASE("capacity decrease sheds overflow from the cheapest edge") {
  SUBCASE("load fits: no movement") {
    OnlineState s(solved_two_by_two(), 11);
    auto out = s.handle_event(CapacityChangeEvent{ConsumerId{1}, Rational(6)});
    CHECK(out.weight_deltas.empty());
    CHECK(out.cost_after == 10);
  }
  SUBCASE("overflow moves to the only alternative") {
    GraphState g = GraphState::complete(1, {Rational(10), Rational(10)},
                                        {{Rational(1), Rational(2)}});
    g.apply_event(DemandEvent{ProducerId{0}, Rational(10)});
    g.add_weight(ProducerId{0}, ConsumerId{0}, Rational(10));
    OnlineState s(std::move(g), 11);
    auto out = s.handle_event(CapacityChangeEvent{ConsumerId{0}, Rational(7)});
    REQUIRE_FALSE(out.rejected.has_value());
    CHECK(s.graph().assignment().get(ProducerId{0}, ConsumerId{0}) == 7);
    CHECK(s.graph().assignment().get(ProducerId{0}, ConsumerId{1}) == 3);
    CHECK(out.cost_after == 13);
    CHECK(dual_ok(s));
  }
  SUBCASE("decrease to zero clears the column like a failure") {
    GraphState g = GraphState::complete(1, {Rational(10), Rational(10)},
                                        {{Rational(1), Rational(2)}});
    g.apply_event(DemandEvent{ProducerId{0}, Rational(10)});
    g.add_weight(ProducerId{0}, ConsumerId{0}, Rational(10));
    OnlineState s(std::move(g), 11);
    auto out = s.handle_event(CapacityChangeEvent{ConsumerId{0}, Rational(0)});
    REQUIRE_FALSE(out.rejected.has_value());
    CHECK(s.graph().consumer_load(ConsumerId{0}) == 0);
    CHECK(s.graph().assignment().get(ProducerId{0}, ConsumerId{1}) == 10);
    CHECK(s.graph().consumer(ConsumerId{0}).alive);
  }
  SUBCASE("sheds the minimum-distance edge first") {
    GraphState g = GraphState::complete(2, {Rational(10), Rational(10)},
                                        {{Rational(1), Rational(4)}, {Rational(3), Rational(4)}});
    g.apply_event(DemandEvent{ProducerId{0}, Rational(5)});
    g.apply_event(DemandEvent{ProducerId{1}, Rational(5)});
    g.add_weight(ProducerId{0}, ConsumerId{0}, Rational(5));
    g.add_weight(ProducerId{1}, ConsumerId{0}, Rational(5));
    OnlineState s(std::move(g), 11);
    auto out = s.handle_event(CapacityChangeEvent{ConsumerId{0}, Rational(6)});
    REQUIRE_FALSE(out.rejected.has_value());
    // producer 0 has the cheaper edge (distance 1 vs 3), so its weight moves
    CHECK(s.graph().assignment().get(ProducerId{0}, ConsumerId{0}) == 1);
    CHECK(s.graph().assignment().get(ProducerId{0}, ConsumerId{1}) == 4);
    CHECK(s.graph().assignment().get(ProducerId{1}, ConsumerId{0}) == 5);
  }
  SUBCASE("overflow with nowhere to go is rejected") {
    GraphState g = GraphState::complete(1, {Rational(10)}, {{Rational(1)}});
    g.apply_event(DemandEvent{ProducerId{0}, Rational(10)});
    g.add_weight(ProducerId{0}, ConsumerId{0}, Rational(10));
    OnlineState s(std::move(g), 11);
    GraphState before = s.graph();
    auto out = s.handle_event(CapacityChangeEvent{ConsumerId{0}, Rational(7)});
    REQUIRE(out.rejected.has_value());
    CHECK(s.graph() == before);
  }
  SUBCASE("increases are plain mutations") {
    OnlineState s(two_by_two(), 11);
    auto out = s.handle_event(CapacityChangeEvent{ConsumerId{0}, Rational(50)});
    CHECK_FALSE(out.rejected.has_value());
    CHECK(s.graph().consumer(ConsumerId{0}).capacity == 50);
  }
  SUBCASE("direct calls validate their preconditions") {
    OnlineState s(two_by_two(), 11);
    CHECK_THROWS_AS(s.handle_capacity_decrease(ConsumerId{0}, Rational(9)), InvalidEventError);
    s.handle_event(ConsumerFailEvent{ConsumerId{0}});
    CHECK_THROWS_AS(s.handle_capacity_decrease(ConsumerId{0}, Rational(1)), DeadTargetError);
  }
}

TEST_CASE("edge restore keeps the restored pair feasible") {
  OnlineState s(two_by_two(), 13);
  s.handle_event(DemandEvent{ProducerId{0}, Rational(4)});
  s.handle_event(EdgeFailEvent{ProducerId{0}, ConsumerId{1}});
  // restore at a distance below the producer potential: z must clamp up
  auto out = s.handle_event(EdgeRestoreEvent{ProducerId{0}, ConsumerId{1}, Rational(0)});
  CHECK_FALSE(out.rejected.has_value());
  CHECK(s.graph().edge_usable(ProducerId{0}, ConsumerId{1}));
  CHECK(dual_ok(s));
}

TEST_CASE("weight deltas reproduce the posterior assignment") {
  Rng seeds(808);
  for (int round = 0; round < 20; ++round) {
    GraphState g = GraphState::complete(
        2, {Rational(6), Rational(6)},
        {{Rational(1), Rational(2)}, {Rational(2), Rational(1)}});
    OnlineState s(g, seeds.next_u64());
    std::map<std::pair<std::uint32_t, std::uint32_t>, Rational> tracked;
    std::vector<ServiceRequest> script = {
        DemandEvent{ProducerId{0}, Rational(5)},
        DemandEvent{ProducerId{1}, Rational(4)},
        CapacityChangeEvent{ConsumerId{0}, Rational(3)},
        ConsumerAddEvent{Rational(4), {Rational(1), Rational(1, 2)}},
        EdgeFailEvent{ProducerId{0}, ConsumerId{1}},
    };
    for (const auto& event : script) {
      auto out = s.handle_event(event);
      if (out.rejected) continue;
      for (const auto& d : out.weight_deltas) {
        auto key = std::make_pair(d.producer.value, d.consumer.value);
        tracked[key] += d.delta;
        if (tracked[key] == 0) tracked.erase(key);
      }
      CHECK(dual_ok(s));
      CHECK(s.graph().check_feasibility().empty());
      CHECK(s.graph().validate_structure().empty());
    }
    std::map<std::pair<std::uint32_t, std::uint32_t>, Rational> actual;
    for (const auto& [key, w] : s.graph().assignment().entries()) actual[key] = w;
    CHECK(tracked == actual);
  }
}

TEST_CASE("demand-only traces never decrease a weight") {
  Rng seeds(909);
  for (int round = 0; round < 15; ++round) {
    GraphState g = GraphState::complete(
        3, {Rational(9), Rational(9)},
        {{Rational(1), Rational(2)}, {Rational(3), Rational(1)}, {Rational(2), Rational(2)}});
    OnlineState s(g, seeds.next_u64());
    std::map<std::pair<std::uint32_t, std::uint32_t>, Rational> seen;
    for (std::uint32_t p = 0; p < 3; ++p) {
      auto out = s.handle_event(DemandEvent{ProducerId{p}, Rational(3 + p)});
      REQUIRE_FALSE(out.rejected.has_value());
      for (const auto& d : out.weight_deltas) CHECK(d.delta > 0);
      for (const auto& [key, w] : s.graph().assignment().entries()) {
        auto it = seen.find(key);
        if (it != seen.end()) CHECK(w >= it->second);
        seen[key] = w;
      }
    }
  }
}

TEST_CASE("same trace and seed replay identically") {
  Trace t;
  t.initial = two_by_two();
  t.rng_seed = 4242;
  t.events = {DemandEvent{ProducerId{0}, Rational(4)}, DemandEvent{ProducerId{1}, Rational(6)},
              DistanceChangeEvent{ProducerId{0}, ConsumerId{0}, Rational(2)},
              CapacityChangeEvent{ConsumerId{1}, Rational(8)}};

  OnlineState a(t), b(t);
  for (const auto& event : t.events) {
    auto ra = a.handle_event(event);
    auto rb = b.handle_event(event);
    CHECK(ra.cost_after == rb.cost_after);
    CHECK(ra.weight_deltas.size() == rb.weight_deltas.size());
  }
  CHECK(a.graph() == b.graph());
  CHECK(a.dual() == b.dual());
  CHECK(a.op_counter() == b.op_counter());
}

TEST_CASE("unknown ids propagate without touching state") {
  OnlineState s(two_by_two(), 3);
  GraphState before = s.graph();
  CHECK_THROWS_AS(s.handle_event(DemandEvent{ProducerId{7}, Rational(1)}), UnknownIdError);
  CHECK_THROWS_AS(s.handle_event(ConsumerFailEvent{ConsumerId{7}}), UnknownIdError);
  CHECK_THROWS_AS(s.handle_event(DemandEvent{ProducerId{0}, Rational(-1)}), InvalidEventError);
  CHECK(s.graph() == before);
}

TEST_CASE("op counter grows with handled events") {
  OnlineState s(two_by_two(), 3);
  CHECK(s.op_counter() == 0);
  s.handle_event(DemandEvent{ProducerId{0}, Rational(4)});
  auto after_first = s.op_counter();
  CHECK(after_first >= 2);
  s.handle_event(DistanceChangeEvent{ProducerId{0}, ConsumerId{0}, Rational(2)});
  CHECK(s.op_counter() == after_first + 1);
}
