#include "dynassign/errors.hpp"
#include "dynassign/trace_io.hpp"

#include <doctest.h>

#include <sstream>

using namespace dynassign;

namespace {

Trace sample_trace() {
  Trace t;
  t.initial = GraphState::complete(2, {Rational(5), Rational(10)},
                                   {{Rational(1), Rational(3)}, {Rational(2), Rational(1)}});
  t.rng_seed = 7;
  t.events.push_back(DemandEvent{ProducerId{0}, Rational(4)});
  t.events.push_back(DemandEvent{ProducerId{1}, Rational(6)});
  return t;
}

std::string dump(const ServiceRequest& e) { return event_to_json(e).dump(); }

}  // namespace

TEST_CASE("trace file format is stable") {
  std::ostringstream out;
  write_trace(out, sample_trace());
  CHECK(out.str() ==
        "{\"record\":\"init\",\"seed\":\"7\",\"capacities\":[\"5\",\"10\"],"
        "\"distances\":[[\"1\",\"3\"],[\"2\",\"1\"]]}\n"
        "{\"record\":\"event\",\"kind\":\"demand\",\"producer\":0,\"amount\":\"4\"}\n"
        "{\"record\":\"event\",\"kind\":\"demand\",\"producer\":1,\"amount\":\"6\"}\n");
}

TEST_CASE("traces round-trip through the line format") {
  Trace t = sample_trace();
  t.events.push_back(DistanceChangeEvent{ProducerId{0}, ConsumerId{1}, Rational(7, 2)});
  t.events.push_back(EdgeFailEvent{ProducerId{1}, ConsumerId{0}});
  t.events.push_back(EdgeRestoreEvent{ProducerId{1}, ConsumerId{0}, Rational(4)});
  t.events.push_back(ProducerFailEvent{ProducerId{0}});
  t.events.push_back(ConsumerFailEvent{ConsumerId{0}});
  t.events.push_back(ConsumerAddEvent{Rational(9), {Rational(2)}});
  t.events.push_back(CapacityChangeEvent{ConsumerId{1}, Rational(1, 2)});

  std::ostringstream out;
  write_trace(out, t);
  std::istringstream in(out.str());
  Trace back = read_trace(in);

  CHECK(back.rng_seed == t.rng_seed);
  CHECK(back.initial == t.initial);
  REQUIRE(back.events.size() == t.events.size());
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    CHECK(dump(back.events[i]) == dump(t.events[i]));
  }
}

TEST_CASE("degraded initial states round-trip at clock zero") {
  Trace t = sample_trace();
  t.events.clear();
  t.initial.apply_event(DemandEvent{ProducerId{1}, Rational(6)});
  t.initial.apply_event(EdgeFailEvent{ProducerId{0}, ConsumerId{1}});
  t.initial.apply_event(ConsumerFailEvent{ConsumerId{0}});
  t.initial.reset_clock();

  std::ostringstream out;
  write_trace(out, t);
  std::istringstream in(out.str());
  Trace back = read_trace(in);
  CHECK(back.initial == t.initial);
  CHECK(back.initial.clock() == 0);
}

TEST_CASE("traces with assignments cannot be serialized") {
  Trace t = sample_trace();
  t.initial.add_weight(ProducerId{0}, ConsumerId{0}, Rational(1));
  std::ostringstream out;
  CHECK_THROWS_AS(write_trace(out, t), TraceInvalidError);
}

TEST_CASE("malformed traces are rejected with line numbers") {
  auto read_text = [](const std::string& text) {
    std::istringstream in(text);
    return read_trace(in);
  };
  const std::string init =
      "{\"record\":\"init\",\"seed\":\"1\",\"capacities\":[\"5\"],\"distances\":[[\"1\"]]}\n";

  CHECK_THROWS_AS(read_text(""), TraceInvalidError);
  CHECK_THROWS_AS(read_text("not json\n"), TraceInvalidError);
  CHECK_THROWS_AS(read_text("{\"record\":\"event\"}\n"), TraceInvalidError);
  CHECK_THROWS_AS(read_text(init + "{\"record\":\"event\",\"kind\":\"nope\"}\n"),
                  TraceInvalidError);
  CHECK_THROWS_AS(
      read_text(init + "{\"record\":\"event\",\"kind\":\"demand\",\"producer\":0,\"amount\":1.5}\n"),
      TraceInvalidError);
  CHECK_THROWS_AS(
      read_text(init + "{\"record\":\"event\",\"kind\":\"demand\",\"producer\":-1,\"amount\":\"1\"}\n"),
      TraceInvalidError);

  try {
    read_text(init + "junk\n");
    FAIL("expected a TraceInvalidError");
  } catch (const TraceInvalidError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("integer rationals are accepted on read") {
  std::istringstream in(
      "{\"record\":\"init\",\"seed\":\"1\",\"capacities\":[5],\"distances\":[[1]]}\n"
      "{\"record\":\"event\",\"kind\":\"demand\",\"producer\":0,\"amount\":2}\n");
  Trace t = read_trace(in);
  CHECK(t.initial.consumer(ConsumerId{0}).capacity == 5);
  CHECK(std::get<DemandEvent>(t.events.at(0)).amount == 2);
}

TEST_CASE("state dumps carry the full picture") {
  GraphState g = sample_trace().initial;
  g.apply_event(DemandEvent{ProducerId{0}, Rational(4)});
  g.add_weight(ProducerId{0}, ConsumerId{0}, Rational(4));
  auto j = state_to_json(g);
  CHECK(j["clock"] == 1);
  CHECK(j["cost"] == "4");
  CHECK(j["producers"][0]["demand"] == "4");
  CHECK(j["assignment"][0][2] == "4");
  CHECK(j["edges"][0][1]["distance"] == "3");
}
