#include "dynassign/trace_io.hpp"

#include "dynassign/errors.hpp"
#include "dynassign/rational.hpp"

#include <fstream>
#include <sstream>

namespace dynassign {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string rat_text(const Rational& value) { return format_rational(value); }

Rational rat_field(const json& record, const char* field) {
  if (!record.contains(field)) {
    throw TraceInvalidError(std::string("missing field '") + field + "'");
  }
  const json& v = record.at(field);
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const Error& e) {
      throw TraceInvalidError(std::string("bad rational in '") + field + "': " + e.what());
    }
  }
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number_unsigned()) return Rational(v.get<unsigned long long>());
  throw TraceInvalidError(std::string("field '") + field +
                          "' must be a rational string or integer");
}

std::uint32_t id_field(const json& record, const char* field) {
  if (!record.contains(field) || !record.at(field).is_number_unsigned()) {
    throw TraceInvalidError(std::string("field '") + field +
                            "' must be a nonnegative integer");
  }
  return record.at(field).get<std::uint32_t>();
}

std::vector<Rational> rat_array(const json& value, const char* what) {
  if (!value.is_array()) throw TraceInvalidError(std::string(what) + " must be an array");
  std::vector<Rational> out;
  out.reserve(value.size());
  for (const auto& v : value) {
    if (v.is_string()) {
      out.push_back(parse_rational(v.get<std::string>()));
    } else if (v.is_number_integer()) {
      out.push_back(Rational(v.get<long long>()));
    } else if (v.is_number_unsigned()) {
      out.push_back(Rational(v.get<unsigned long long>()));
    } else {
      throw TraceInvalidError(std::string(what) + " entries must be rational strings");
    }
  }
  return out;
}

ordered_json initial_to_json(const GraphState& state, std::uint64_t seed) {
  ordered_json rec;
  rec["record"] = "init";
  rec["seed"] = std::to_string(seed);
  ordered_json caps = ordered_json::array();
  for (const auto& c : state.consumers()) caps.push_back(rat_text(c.capacity));
  rec["capacities"] = std::move(caps);
  ordered_json rows = ordered_json::array();
  for (const auto& p : state.producers()) {
    ordered_json row = ordered_json::array();
    for (const auto& c : state.consumers()) row.push_back(rat_text(state.edge(p.id, c.id).distance));
    rows.push_back(std::move(row));
  }
  rec["distances"] = std::move(rows);

  // Optional degradations; absent when the state is fresh.
  ordered_json dead_p = ordered_json::array();
  ordered_json consumed = ordered_json::array();
  for (const auto& p : state.producers()) {
    if (!p.alive) dead_p.push_back(p.id.value);
    if (p.demand_consumed) consumed.push_back({p.id.value, rat_text(p.demand)});
  }
  if (!dead_p.empty()) rec["dead_producers"] = std::move(dead_p);
  if (!consumed.empty()) rec["consumed_demands"] = std::move(consumed);
  ordered_json dead_c = ordered_json::array();
  for (const auto& c : state.consumers()) {
    if (!c.alive) dead_c.push_back(c.id.value);
  }
  if (!dead_c.empty()) rec["dead_consumers"] = std::move(dead_c);
  ordered_json dead_e = ordered_json::array();
  for (const auto& p : state.producers()) {
    for (const auto& c : state.consumers()) {
      if (!state.edge(p.id, c.id).alive) dead_e.push_back({p.id.value, c.id.value});
    }
  }
  if (!dead_e.empty()) rec["dead_edges"] = std::move(dead_e);
  return rec;
}

GraphState initial_from_json(const json& rec) {
  if (!rec.contains("capacities") || !rec.contains("distances")) {
    throw TraceInvalidError("init record needs 'capacities' and 'distances'");
  }
  std::vector<Rational> caps = rat_array(rec.at("capacities"), "capacities");
  if (!rec.at("distances").is_array()) throw TraceInvalidError("distances must be an array");
  std::vector<std::vector<Rational>> rows;
  rows.reserve(rec.at("distances").size());
  for (const auto& row : rec.at("distances")) {
    rows.push_back(rat_array(row, "distance row"));
  }
  const std::size_t n_rows = rows.size();
  GraphState state = GraphState::complete(n_rows, std::move(caps), std::move(rows));

  if (rec.contains("consumed_demands")) {
    for (const auto& entry : rec.at("consumed_demands")) {
      if (!entry.is_array() || entry.size() != 2) {
        throw TraceInvalidError("consumed_demands entries are [id, amount] pairs");
      }
      std::uint32_t pid = entry.at(0).get<std::uint32_t>();
      const json& amount = entry.at(1);
      Rational r = amount.is_string() ? parse_rational(amount.get<std::string>())
                                      : Rational(amount.get<long long>());
      state.apply_event(DemandEvent{ProducerId{pid}, std::move(r)});
    }
  }
  if (rec.contains("dead_edges")) {
    for (const auto& entry : rec.at("dead_edges")) {
      if (!entry.is_array() || entry.size() != 2) {
        throw TraceInvalidError("dead_edges entries are [producer, consumer] pairs");
      }
      state.apply_event(EdgeFailEvent{ProducerId{entry.at(0).get<std::uint32_t>()},
                                      ConsumerId{entry.at(1).get<std::uint32_t>()}});
    }
  }
  if (rec.contains("dead_producers")) {
    for (const auto& v : rec.at("dead_producers")) {
      state.apply_event(ProducerFailEvent{ProducerId{v.get<std::uint32_t>()}});
    }
  }
  if (rec.contains("dead_consumers")) {
    for (const auto& v : rec.at("dead_consumers")) {
      state.apply_event(ConsumerFailEvent{ConsumerId{v.get<std::uint32_t>()}});
    }
  }
  state.reset_clock();
  return state;
}

}  // namespace

ordered_json event_to_json(const ServiceRequest& event) {
  ordered_json rec;
  rec["record"] = "event";
  rec["kind"] = event_kind(event);
  struct Visitor {
    ordered_json& rec;
    void operator()(const DemandEvent& e) {
      rec["producer"] = e.producer.value;
      rec["amount"] = rat_text(e.amount);
    }
    void operator()(const DistanceChangeEvent& e) {
      rec["producer"] = e.producer.value;
      rec["consumer"] = e.consumer.value;
      rec["distance"] = rat_text(e.new_distance);
    }
    void operator()(const EdgeFailEvent& e) {
      rec["producer"] = e.producer.value;
      rec["consumer"] = e.consumer.value;
    }
    void operator()(const EdgeRestoreEvent& e) {
      rec["producer"] = e.producer.value;
      rec["consumer"] = e.consumer.value;
      rec["distance"] = rat_text(e.distance);
    }
    void operator()(const ProducerFailEvent& e) { rec["producer"] = e.producer.value; }
    void operator()(const ConsumerFailEvent& e) { rec["consumer"] = e.consumer.value; }
    void operator()(const ConsumerAddEvent& e) {
      rec["capacity"] = rat_text(e.capacity);
      ordered_json row = ordered_json::array();
      for (const auto& d : e.distances) row.push_back(rat_text(d));
      rec["distances"] = std::move(row);
    }
    void operator()(const CapacityChangeEvent& e) {
      rec["consumer"] = e.consumer.value;
      rec["capacity"] = rat_text(e.new_capacity);
    }
  };
  std::visit(Visitor{rec}, event);
  return rec;
}

ServiceRequest event_from_json(const json& record) {
  if (!record.contains("kind") || !record.at("kind").is_string()) {
    throw TraceInvalidError("event record needs a 'kind' string");
  }
  const std::string kind = record.at("kind").get<std::string>();
  if (kind == "demand") {
    return DemandEvent{ProducerId{id_field(record, "producer")}, rat_field(record, "amount")};
  }
  if (kind == "distance_change") {
    return DistanceChangeEvent{ProducerId{id_field(record, "producer")},
                               ConsumerId{id_field(record, "consumer")},
                               rat_field(record, "distance")};
  }
  if (kind == "edge_fail") {
    return EdgeFailEvent{ProducerId{id_field(record, "producer")},
                         ConsumerId{id_field(record, "consumer")}};
  }
  if (kind == "edge_restore") {
    return EdgeRestoreEvent{ProducerId{id_field(record, "producer")},
                            ConsumerId{id_field(record, "consumer")},
                            rat_field(record, "distance")};
  }
  if (kind == "producer_fail") return ProducerFailEvent{ProducerId{id_field(record, "producer")}};
  if (kind == "consumer_fail") return ConsumerFailEvent{ConsumerId{id_field(record, "consumer")}};
  if (kind == "consumer_add") {
    if (!record.contains("distances")) throw TraceInvalidError("consumer_add needs 'distances'");
    return ConsumerAddEvent{rat_field(record, "capacity"),
                            rat_array(record.at("distances"), "distances")};
  }
  if (kind == "capacity_change") {
    return CapacityChangeEvent{ConsumerId{id_field(record, "consumer")},
                               rat_field(record, "capacity")};
  }
  throw TraceInvalidError("unknown event kind '" + kind + "'");
}

void write_trace(std::ostream& out, const Trace& trace) {
  if (!trace.initial.assignment().empty()) {
    throw TraceInvalidError("trace initial state must carry no assignment");
  }
  out << initial_to_json(trace.initial, trace.rng_seed).dump() << "\n";
  for (const auto& event : trace.events) {
    out << event_to_json(event).dump() << "\n";
  }
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  bool saw_init = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw TraceInvalidError("line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      const std::string record_kind =
          rec.contains("record") && rec.at("record").is_string() ? rec.at("record").get<std::string>()
                                                                 : "";
      if (!saw_init) {
        if (record_kind != "init") {
          throw TraceInvalidError("first record must have record=init");
        }
        trace.initial = initial_from_json(rec);
        if (rec.contains("seed")) {
          const json& s = rec.at("seed");
          if (s.is_string()) {
            trace.rng_seed = std::stoull(s.get<std::string>());
          } else if (s.is_number_unsigned()) {
            trace.rng_seed = s.get<std::uint64_t>();
          } else {
            throw TraceInvalidError("seed must be a decimal string");
          }
        }
        saw_init = true;
        continue;
      }
      if (record_kind != "event") {
        throw TraceInvalidError("expected record=event");
      }
      trace.events.push_back(event_from_json(rec));
    } catch (const TraceInvalidError& e) {
      throw TraceInvalidError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw TraceInvalidError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const json::exception& e) {
      throw TraceInvalidError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw TraceInvalidError("line " + std::to_string(line_no) + ": bad number: " + e.what());
    } catch (const std::out_of_range& e) {
      throw TraceInvalidError("line " + std::to_string(line_no) + ": number out of range");
    }
  }
  if (!saw_init) throw TraceInvalidError("trace has no init record");
  return trace;
}

void write_trace_file(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TraceInvalidError("cannot open '" + path + "' for writing");
  write_trace(out, trace);
  if (!out) throw TraceInvalidError("write to '" + path + "' failed");
}

Trace read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceInvalidError("cannot open '" + path + "'");
  return read_trace(in);
}

ordered_json state_to_json(const GraphState& state) {
  ordered_json out;
  out["clock"] = state.clock();
  ordered_json producers = ordered_json::array();
  for (const auto& p : state.producers()) {
    ordered_json rec;
    rec["id"] = p.id.value;
    rec["alive"] = p.alive;
    rec["demand_consumed"] = p.demand_consumed;
    if (p.demand_consumed) rec["demand"] = rat_text(p.demand);
    producers.push_back(std::move(rec));
  }
  out["producers"] = std::move(producers);
  ordered_json consumers = ordered_json::array();
  for (const auto& c : state.consumers()) {
    ordered_json rec;
    rec["id"] = c.id.value;
    rec["alive"] = c.alive;
    rec["capacity"] = rat_text(c.capacity);
    consumers.push_back(std::move(rec));
  }
  out["consumers"] = std::move(consumers);
  ordered_json rows = ordered_json::array();
  for (const auto& p : state.producers()) {
    ordered_json row = ordered_json::array();
    for (const auto& c : state.consumers()) {
      const Edge& e = state.edge(p.id, c.id);
      ordered_json cell;
      cell["distance"] = rat_text(e.distance);
      cell["alive"] = e.alive;
      row.push_back(std::move(cell));
    }
    rows.push_back(std::move(row));
  }
  out["edges"] = std::move(rows);
  ordered_json weights = ordered_json::array();
  for (const auto& [key, w] : state.assignment().entries()) {
    weights.push_back({key.first, key.second, rat_text(w)});
  }
  out["assignment"] = std::move(weights);
  out["cost"] = rat_text(state.objective_cost());
  return out;
}

}  // namespace dynassign
