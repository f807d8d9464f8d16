#pragma once

#include "dynassign/model.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>

namespace dynassign {

// Trace files are line-delimited JSON. The first line is the initial state
// record, every following line one event record. All rationals are strings,
// either "p/q" or a finite decimal; seeds are decimal strings (uint64).
// The exact grammar is documented in the README and is stable: golden files
// depend on it.

nlohmann::ordered_json event_to_json(const ServiceRequest& event);
ServiceRequest event_from_json(const nlohmann::json& record);

void write_trace(std::ostream& out, const Trace& trace);
Trace read_trace(std::istream& in);

void write_trace_file(const std::string& path, const Trace& trace);
Trace read_trace_file(const std::string& path);

// Full state dump (nodes, edges, assignment, clock) for reports and the
// python surface. Deterministic field order.
nlohmann::ordered_json state_to_json(const GraphState& state);

}  // namespace dynassign
