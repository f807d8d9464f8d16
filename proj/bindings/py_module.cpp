// Python surface: thin string/JSON wrappers over the trace, replay and
// solver entry points. Everything crossing the boundary is text, so the
// module needs no custom type casters and stays byte-compatible with the
// CLI's file formats.

#include "dynassign/adversary.hpp"
#include "dynassign/errors.hpp"
#include "dynassign/harness.hpp"
#include "dynassign/oracle.hpp"
#include "dynassign/snapshot.hpp"
#include "dynassign/trace_io.hpp"

#include <pybind11/pybind11.h>

#include <cstdint>
#include <sstream>
#include <string>

namespace py = pybind11;
using namespace dynassign;

namespace {

Trace trace_from_text(const std::string& text) {
  std::istringstream in(text);
  return read_trace(in);
}

std::string trace_to_text(const Trace& trace) {
  std::ostringstream out;
  write_trace(out, trace);
  return out.str();
}

AdversaryConfig config_from_text(const std::string& config_json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(config_json);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigInvalidError(std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

GraphState state_at(const Trace& trace, std::int64_t at) {
  std::size_t upto = at < 0 ? trace.events.size() : static_cast<std::size_t>(at);
  if (upto > trace.events.size()) {
    throw ConfigInvalidError("prefix " + std::to_string(upto) + " exceeds the trace's " +
                             std::to_string(trace.events.size()) + " events");
  }
  GraphState state = trace.initial;
  for (std::size_t k = 0; k < upto; ++k) state.apply_event(trace.events[k]);
  return state;
}

SolveResult solve_at(const Trace& trace, std::int64_t at, const std::string& method,
                     bool keep_log) {
  Snapshot snap = Snapshot::fresh(state_at(trace, at));
  if (method == "flow") {
    if (keep_log) throw ConfigInvalidError("the iteration log needs method 'pd'");
    return solve_optimal(snap);
  }
  if (method == "pd") {
    AscentOptions opts;
    opts.keep_log = keep_log;
    return primal_dual_offline(snap, opts);
  }
  throw ConfigInvalidError("method must be 'pd' or 'flow'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Incremental weight assignment on dynamic complete bipartite graphs";
  m.attr("__version__") = "0.1.0";

  py::register_exception<Error>(m, "DynassignError");

  m.def("default_config", [] { return config_to_json(AdversaryConfig{}).dump(2); },
        "Default generator config as a JSON string; edit and pass back.");

  m.def(
      "generate_trace",
      [](const std::string& config_json) {
        AdversaryConfig cfg = config_from_text(config_json);
        return trace_to_text(scenario_trace(cfg, cfg.seed));
      },
      py::arg("config_json"),
      "Generate the configured scenario's trace as line-delimited JSON.");

  m.def(
      "replay_summary",
      [](const std::string& trace_text, const std::string& algorithm) {
        RunMetrics metrics = replay(trace_from_text(trace_text), algorithm_from_name(algorithm));
        return metrics_summary_json(metrics, false).dump(2);
      },
      py::arg("trace_text"), py::arg("algorithm") = "online",
      "Replay a trace and return the summary JSON (ratios, bound, invariants).");

  m.def(
      "replay_csv",
      [](const std::string& trace_text, const std::string& algorithm) {
        RunMetrics metrics = replay(trace_from_text(trace_text), algorithm_from_name(algorithm));
        return metrics_to_csv(metrics);
      },
      py::arg("trace_text"), py::arg("algorithm") = "online",
      "Replay a trace and return the per-event CSV.");

  m.def(
      "solve_prefix",
      [](const std::string& trace_text, std::int64_t at, const std::string& method) {
        return solve_result_json(solve_at(trace_from_text(trace_text), at, method, false)).dump(2);
      },
      py::arg("trace_text"), py::arg("at") = -1, py::arg("method") = "pd",
      "Exact optimum for the first `at` events (-1 = all) via 'pd' or 'flow'.");

  m.def(
      "solve_iterations_csv",
      [](const std::string& trace_text, std::int64_t at) {
        return iterations_to_csv(solve_at(trace_from_text(trace_text), at, "pd", true));
      },
      py::arg("trace_text"), py::arg("at") = -1,
      "Per-iteration CSV of the dual-ascent solver on a trace prefix.");

  m.def(
      "state_at",
      [](const std::string& trace_text, std::int64_t at) {
        return state_to_json(state_at(trace_from_text(trace_text), at)).dump(2);
      },
      py::arg("trace_text"), py::arg("at") = -1,
      "Graph state JSON after applying the first `at` events (-1 = all).");

  m.def(
      "bench",
      [](const std::string& config_json, const std::string& algorithm, std::uint32_t trials,
         unsigned threads) {
        MonteCarloSummary summary =
            monte_carlo(config_from_text(config_json), algorithm_from_name(algorithm), trials,
                        threads);
        return monte_carlo_json(summary).dump(2);
      },
      py::arg("config_json"), py::arg("algorithm") = "online", py::arg("trials") = 100,
      py::arg("threads") = 0,
      "Monte-Carlo ratio experiment; returns the aggregate summary JSON.");

  m.def(
      "ratio_bound",
      [](const std::string& d_max, const std::string& d_min, std::uint32_t consumers) {
        return format_rational(
            ratio_bound(parse_rational(d_max), parse_rational(d_min), consumers));
      },
      py::arg("d_max"), py::arg("d_min"), py::arg("consumers"),
      "The (d_max/d_min) * ln(consumers) guarantee as an exact rational string.");
}
