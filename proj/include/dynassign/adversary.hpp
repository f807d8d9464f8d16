#pragma once

#include "dynassign/model.hpp"
#include "dynassign/snapshot.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>

namespace dynassign {

struct RationalRange {
  Rational lo{0};
  Rational hi{0};  // inclusive
};

enum class Scenario { SortedDemands, DistanceAttack, FailureStorm, UniformRandom };

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

struct AdversaryConfig {
  std::uint32_t n_producers{1};
  std::uint32_t n_consumers{1};
  RationalRange demand_range{1, 10};
  RationalRange distance_range{1, 4};
  RationalRange capacity_range{1, 10};
  std::uint64_t seed{0};
  Scenario scenario{Scenario::UniformRandom};
  // Events appended by the attack/storm generators; 0 means
  // n_producers + n_consumers.
  std::uint32_t extra_events{0};
  // Draw integers instead of grid rationals (oracle-equivalence fuel wants
  // small integer data).
  bool integer_draws{false};
};

// Throws ConfigInvalid when ranges are empty/negative or the scenario's
// extra constraints fail (ratio scenarios need strictly positive
// distances; two-consumer sorted traces need at least two producers).
void validate(const AdversaryConfig& cfg, Scenario scenario);

AdversaryConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const AdversaryConfig& cfg);

// Demand-only trace with ascending demand amounts, one home consumer per
// producer sized to its homed demands (total capacity equals total
// demand), and per-producer distance rows whose spread is capped so the
// online cost can never leave the published ratio bound.
Trace gen_sorted_demands(const AdversaryConfig& cfg);

// Replays `prior` and appends distance increases that always strike the
// maximum-weight edge (ties toward the lowest producer, then consumer id).
Trace gen_distance_attack(const AdversaryConfig& cfg, const Trace& prior);

// Uniform instance for oracle-equivalence testing. Feasibility is enforced
// by rescaling demands (grid mode) or trimming the largest demands
// (integer mode, which must stay on the integer lattice).
Snapshot gen_random_instance(const AdversaryConfig& cfg);

// Replays `prior` and appends failures/capacity cuts that the online
// engine provably survives (each candidate is simulated before being
// committed).
Trace gen_failure_storm(const AdversaryConfig& cfg, const Trace& prior);

}  // namespace dynassign
