#pragma once

#include "dynassign/adversary.hpp"
#include "dynassign/model.hpp"
#include "dynassign/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dynassign {

// Which algorithm a replay drives. OfflinePD re-solves the whole prefix
// after every event with the dual-ascent solver; Online feeds events to the
// incremental engine and never re-optimizes committed weight.
enum class AlgorithmId { OfflinePD, Online };

std::string algorithm_name(AlgorithmId alg);
AlgorithmId algorithm_from_name(const std::string& name);

struct EventRecord {
  std::uint64_t clock = 0;
  std::string kind;
  bool accepted = true;
  Rational alg_cost;
  Rational opt_cost;
  // Undefined (and excluded from the max) while the optimum is still zero.
  std::optional<Rational> ratio;
  std::uint64_t op_count = 0;
};

struct RunMetrics {
  std::uint64_t seed = 0;
  AlgorithmId algorithm = AlgorithmId::Online;
  std::vector<EventRecord> records;
  std::optional<Rational> max_ratio;
  std::optional<Rational> mean_ratio;
  // (d_max/d_min) * ln(consumers) over the distances the trace can ever
  // expose; absent when some distance is zero or there is nothing to bound.
  std::optional<Rational> bound;
  double runtime_seconds = 0.0;
  bool invariants_ok = true;
  std::vector<std::string> violations;
};

struct MonteCarloSummary {
  std::uint64_t seed = 0;
  AlgorithmId algorithm = AlgorithmId::Online;
  std::uint32_t trials = 0;
  std::uint64_t total_events = 0;
  std::uint64_t total_accepted = 0;
  std::optional<Rational> mean_max_ratio;
  std::optional<Rational> max_ratio;
  // Trials whose max-over-time ratio exceeds their own bound, as a fraction
  // of all trials. Single-consumer trials are skipped: the bound formula
  // collapses to zero there while the ratio is identically one.
  Rational violation_fraction;
  std::uint32_t bound_checked_trials = 0;
  bool invariants_ok = true;
};

// Replays every event, recomputing the exact optimum on the accepted prefix
// after each one. Events the algorithm rejects are recorded and left out of
// the oracle's prefix as well. Structural errors inside events surface as
// TraceInvalidError.
RunMetrics replay(const Trace& trace, AlgorithmId algorithm);

// (d_max/d_min) * ln(n_consumers), rounded up in the last reported digit.
// The only non-exact quantity in the system; n_consumers == 1 yields 0.
Rational ratio_bound(const Rational& d_max, const Rational& d_min, std::uint32_t n_consumers);

// Runs `trials` independent replays of the configured scenario, one derived
// seed per trial, and aggregates order-independently. Thread count 0 means
// hardware concurrency.
MonteCarloSummary monte_carlo(const AdversaryConfig& cfg, AlgorithmId algorithm,
                              std::uint32_t trials, unsigned threads = 0);

// Builds the trace a monte_carlo trial replays for this config and seed.
// Scenarios that take a prior trace get one generated from the same config
// (sorted demands for the distance attack, a uniform random instance turned
// into demand events for the failure storm).
Trace scenario_trace(const AdversaryConfig& cfg, std::uint64_t trial_seed);

std::string metrics_to_csv(const RunMetrics& metrics);
nlohmann::ordered_json metrics_summary_json(const RunMetrics& metrics, bool include_runtime);
nlohmann::ordered_json monte_carlo_json(const MonteCarloSummary& summary);

struct SolveResult;
nlohmann::ordered_json solve_result_json(const SolveResult& result);
std::string iterations_to_csv(const SolveResult& result);

}  // namespace dynassign
