#include "dynassign/adversary.hpp"

#include "dynassign/approx.hpp"
#include "dynassign/errors.hpp"
#include "dynassign/oracle.hpp"
#include "dynassign/online.hpp"
#include "dynassign/rng.hpp"

#include <algorithm>
#include <optional>

namespace dynassign {

namespace {

// Grid denominator for rational draws: highly divisible, keeps products of
// two draws at manageable denominators.
constexpr std::uint64_t kGrid = 720;

Int floor_rat(const Rational& r) {
  Int n = numerator(r), d = denominator(r);
  Int q = n / d;
  if (n < 0 && q * d != n) --q;
  return q;
}

Int ceil_rat(const Rational& r) { return -floor_rat(-r); }

Rational draw_grid(Rng& rng, const RationalRange& range) {
  if (range.lo == range.hi) return range.lo;
  std::uint64_t k = rng.below(kGrid + 1);
  return range.lo + (range.hi - range.lo) * Rational(k, kGrid);
}

Rational draw_integer(Rng& rng, const RationalRange& range) {
  Int lo = ceil_rat(range.lo), hi = floor_rat(range.hi);
  if (lo > hi) throw ConfigInvalidError("range holds no integer");
  Int span = hi - lo;
  std::uint64_t width = span.convert_to<std::uint64_t>();
  return Rational(lo + Int(rng.below(width + 1)));
}

Rational draw_in(Rng& rng, const RationalRange& range, bool integer_mode) {
  return integer_mode ? draw_integer(rng, range) : draw_grid(rng, range);
}

void check_range(const RationalRange& r, const char* name) {
  if (r.lo > r.hi) throw ConfigInvalidError(std::string(name) + " range is empty");
  if (r.lo < 0) throw ConfigInvalidError(std::string(name) + " range has a negative bound");
}

std::uint32_t default_extra(const AdversaryConfig& cfg) {
  return cfg.extra_events ? cfg.extra_events : cfg.n_producers + cfg.n_consumers;
}

void replay_into(OnlineState& engine, const Trace& trace) {
  for (const auto& event : trace.events) engine.handle_event(event);
}

}  // namespace

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::SortedDemands:
      return "sorted_demands";
    case Scenario::DistanceAttack:
      return "distance_attack";
    case Scenario::FailureStorm:
      return "failure_storm";
    case Scenario::UniformRandom:
      return "uniform_random";
  }
  throw ConfigInvalidError("unknown scenario value");
}

Scenario scenario_from_name(const std::string& name) {
  if (name == "sorted_demands") return Scenario::SortedDemands;
  if (name == "distance_attack") return Scenario::DistanceAttack;
  if (name == "failure_storm") return Scenario::FailureStorm;
  if (name == "uniform_random") return Scenario::UniformRandom;
  throw ConfigInvalidError("unknown scenario '" + name + "'");
}

void validate(const AdversaryConfig& cfg, Scenario scenario) {
  check_range(cfg.demand_range, "demand");
  check_range(cfg.distance_range, "distance");
  check_range(cfg.capacity_range, "capacity");
  if (cfg.integer_draws) {
    for (const auto* r : {&cfg.demand_range, &cfg.capacity_range, &cfg.distance_range}) {
      if (ceil_rat(r->lo) > floor_rat(r->hi)) {
        throw ConfigInvalidError("integer draws need an integer inside every range");
      }
    }
  }
  const bool ratio_scenario =
      scenario == Scenario::SortedDemands || scenario == Scenario::DistanceAttack;
  if (ratio_scenario && cfg.distance_range.lo <= 0) {
    throw ConfigInvalidError("ratio scenarios need strictly positive distances");
  }
  if (scenario == Scenario::SortedDemands) {
    if (cfg.n_producers < 1 || cfg.n_consumers < 1) {
      throw ConfigInvalidError("sorted-demand traces need producers and consumers");
    }
    if (cfg.n_consumers == 2) {
      // With two consumers the published ratio bound carries an ln 2
      // factor; the per-row spread cap must still admit spread >= 1, and
      // pinning the global extremes needs two distinct rows.
      if (cfg.n_producers < 2) {
        throw ConfigInvalidError("two-consumer sorted traces need at least two producers");
      }
      Rational rho = cfg.distance_range.hi / cfg.distance_range.lo;
      if (rho * ln_lower(2) < 1) {
        throw ConfigInvalidError(
            "two-consumer sorted traces need distance spread of at least 1/ln(2)");
      }
    }
  }
}

AdversaryConfig config_from_json(const nlohmann::json& j) {
  AdversaryConfig cfg;
  auto range = [&](const char* key, RationalRange& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2) {
      throw ConfigInvalidError(std::string(key) + " must be [lo, hi]");
    }
    auto rat = [](const nlohmann::json& x) {
      if (x.is_string()) return parse_rational(x.get<std::string>());
      if (x.is_number_integer()) return Rational(x.get<long long>());
      if (x.is_number_unsigned()) return Rational(x.get<unsigned long long>());
      throw ConfigInvalidError("range bounds must be rational strings or integers");
    };
    out.lo = rat(v.at(0));
    out.hi = rat(v.at(1));
  };
  try {
    if (j.contains("n_producers")) cfg.n_producers = j.at("n_producers").get<std::uint32_t>();
    if (j.contains("n_consumers")) cfg.n_consumers = j.at("n_consumers").get<std::uint32_t>();
    range("demand_range", cfg.demand_range);
    range("distance_range", cfg.distance_range);
    range("capacity_range", cfg.capacity_range);
    if (j.contains("seed")) {
      const auto& s = j.at("seed");
      cfg.seed = s.is_string() ? std::stoull(s.get<std::string>()) : s.get<std::uint64_t>();
    }
    if (j.contains("scenario")) cfg.scenario = scenario_from_name(j.at("scenario").get<std::string>());
    if (j.contains("extra_events")) cfg.extra_events = j.at("extra_events").get<std::uint32_t>();
    if (j.contains("integer_draws")) cfg.integer_draws = j.at("integer_draws").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigInvalidError(std::string("bad config: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ConfigInvalidError("bad seed string");
  } catch (const std::out_of_range&) {
    throw ConfigInvalidError("seed out of range");
  }
  return cfg;
}

nlohmann::ordered_json config_to_json(const AdversaryConfig& cfg) {
  nlohmann::ordered_json j;
  j["n_producers"] = cfg.n_producers;
  j["n_consumers"] = cfg.n_consumers;
  j["demand_range"] = {format_rational(cfg.demand_range.lo), format_rational(cfg.demand_range.hi)};
  j["distance_range"] = {format_rational(cfg.distance_range.lo),
                         format_rational(cfg.distance_range.hi)};
  j["capacity_range"] = {format_rational(cfg.capacity_range.lo),
                         format_rational(cfg.capacity_range.hi)};
  j["seed"] = std::to_string(cfg.seed);
  j["scenario"] = scenario_name(cfg.scenario);
  j["extra_events"] = cfg.extra_events;
  j["integer_draws"] = cfg.integer_draws;
  return j;
}

Trace gen_sorted_demands(const AdversaryConfig& cfg) {
  validate(cfg, Scenario::SortedDemands);
  Rng rng(cfg.seed);
  const std::uint32_t n = cfg.n_producers, m = cfg.n_consumers;

  std::vector<Rational> demands;
  demands.reserve(n);
  for (std::uint32_t k = 0; k < n; ++k) demands.push_back(draw_in(rng, cfg.demand_range, cfg.integer_draws));
  std::sort(demands.begin(), demands.end());

  // Home consumer k % m; capacities add up to exactly the total demand, so
  // each consumer saturates under the intended pairing.
  std::vector<Rational> caps(m, Rational(0));
  for (std::uint32_t k = 0; k < n; ++k) caps[k % m] += demands[k];

  // Per-row distance spread cap: the online algorithm only ever uses the
  // demanding producer's own row, so the worst prefix ratio is bounded by
  // the widest row spread. Three consumers and up tolerate the full range
  // (ln m > 1); two consumers get rows narrowed by an ln 2 factor, with
  // the global extremes pinned into the first and last rows.
  const Rational lo = cfg.distance_range.lo, hi = cfg.distance_range.hi;
  const Rational rho = hi / lo;
  Rational beta = m >= 3 ? rho : (m == 2 ? Rational(rho * ln_lower(2)) : Rational(1));
  if (beta < 1) beta = 1;
  const RationalRange base_range{lo, hi / beta};
  const RationalRange factor_range{1, beta};

  std::vector<std::vector<Rational>> rows(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    Rational base = draw_grid(rng, base_range);
    if (m == 2 && i == 0) base = lo;
    if (m == 2 && i == n - 1) base = hi / beta;
    rows[i].reserve(m);
    for (std::uint32_t j = 0; j < m; ++j) {
      Rational factor = draw_grid(rng, factor_range);
      if (m == 2 && i == 0 && j == 0) factor = 1;
      if (m == 2 && i == n - 1 && j == m - 1) factor = beta;
      rows[i].push_back(base * factor);
    }
  }

  Trace trace;
  trace.initial = GraphState::complete(n, std::move(caps), std::move(rows));
  trace.rng_seed = cfg.seed;
  trace.events.reserve(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    trace.events.push_back(DemandEvent{ProducerId{k}, demands[k]});
  }
  return trace;
}

Snapshot gen_random_instance(const AdversaryConfig& cfg) {
  validate(cfg, Scenario::UniformRandom);
  Rng rng(cfg.seed);
  Snapshot snap;
  for (std::uint32_t i = 0; i < cfg.n_producers; ++i) {
    snap.producers.push_back({ProducerId{i}, draw_in(rng, cfg.demand_range, cfg.integer_draws)});
  }
  for (std::uint32_t j = 0; j < cfg.n_consumers; ++j) {
    snap.consumers.push_back({ConsumerId{j}, draw_in(rng, cfg.capacity_range, cfg.integer_draws)});
  }
  for (std::uint32_t i = 0; i < cfg.n_producers; ++i) {
    std::vector<Rational> drow;
    drow.reserve(cfg.n_consumers);
    for (std::uint32_t j = 0; j < cfg.n_consumers; ++j) {
      drow.push_back(draw_in(rng, cfg.distance_range, cfg.integer_draws));
    }
    snap.distance.push_back(std::move(drow));
    snap.usable.emplace_back(cfg.n_consumers, char(1));
  }

  Rational total_demand = snap.total_remaining();
  Rational total_capacity = snap.total_residual();
  if (total_demand > total_capacity) {
    if (cfg.integer_draws) {
      // Proportional rescaling would leave the integer lattice; trim the
      // largest demands instead (lowest id first on ties).
      Rational excess = total_demand - total_capacity;
      while (excess > 0) {
        std::size_t pick = 0;
        for (std::size_t i = 1; i < snap.producers.size(); ++i) {
          if (snap.producers[i].remaining > snap.producers[pick].remaining) pick = i;
        }
        Rational cut = snap.producers[pick].remaining < excess ? snap.producers[pick].remaining
                                                               : excess;
        snap.producers[pick].remaining -= cut;
        excess -= cut;
      }
    } else {
      Rational scale = total_capacity / total_demand;
      for (auto& row : snap.producers) row.remaining *= scale;
    }
  }
  return snap;
}

Trace gen_distance_attack(const AdversaryConfig& cfg, const Trace& prior) {
  validate(cfg, Scenario::DistanceAttack);
  OnlineState engine(prior);
  replay_into(engine, prior);

  Rng gen(cfg.seed);
  Trace out = prior;
  const std::uint32_t strikes = default_extra(cfg);
  for (std::uint32_t t = 0; t < strikes; ++t) {
    // Argmax-weight edge; the map is ordered by (producer, consumer), so a
    // strict comparison keeps the lowest pair on ties.
    std::optional<Assignment::Key> best;
    Rational best_w;
    for (const auto& [key, w] : engine.graph().assignment().entries()) {
      if (!best || w > best_w) {
        best = key;
        best_w = w;
      }
    }
    if (!best) throw NoWeightedEdgeError("no weighted edge to attack");
    ProducerId p{best->first};
    ConsumerId c{best->second};
    Rational diff = draw_in(gen, cfg.distance_range, cfg.integer_draws);
    DistanceChangeEvent strike{p, c, engine.graph().edge(p, c).distance + diff};
    engine.handle_event(strike);
    out.events.push_back(strike);
  }
  return out;
}

Trace gen_failure_storm(const AdversaryConfig& cfg, const Trace& prior) {
  validate(cfg, Scenario::FailureStorm);
  OnlineState engine(prior);
  replay_into(engine, prior);

  Rng gen(cfg.seed);
  Trace out = prior;
  const std::uint32_t target = default_extra(cfg);
  std::uint32_t accepted = 0;
  std::uint32_t budget = 20 * target + 20;

  while (accepted < target) {
    if (budget-- == 0) {
      throw CannotKeepFeasibleError("storm generation ran out of feasible candidates");
    }
    const GraphState& g = engine.graph();
    std::optional<ServiceRequest> candidate;
    switch (gen.below(4)) {
      case 0: {
        std::vector<ProducerId> alive;
        for (const auto& p : g.producers()) {
          if (p.alive) alive.push_back(p.id);
        }
        if (alive.empty()) break;
        candidate = ProducerFailEvent{alive[gen.below(alive.size())]};
        break;
      }
      case 1: {
        std::vector<ConsumerId> alive;
        for (const auto& c : g.consumers()) {
          if (c.alive) alive.push_back(c.id);
        }
        if (alive.empty()) break;
        candidate = ConsumerFailEvent{alive[gen.below(alive.size())]};
        break;
      }
      case 2: {
        std::vector<ConsumerId> cuttable;
        for (const auto& c : g.consumers()) {
          if (c.alive && c.capacity > 0) cuttable.push_back(c.id);
        }
        if (cuttable.empty()) break;
        ConsumerId c = cuttable[gen.below(cuttable.size())];
        Rational cap = g.consumer(c).capacity;
        candidate = CapacityChangeEvent{c, cap * Rational(gen.below(kGrid), kGrid)};
        break;
      }
      default: {
        std::vector<std::pair<ProducerId, ConsumerId>> usable;
        for (const auto& p : g.producers()) {
          for (const auto& c : g.consumers()) {
            if (g.edge_usable(p.id, c.id)) usable.emplace_back(p.id, c.id);
          }
        }
        if (usable.empty()) break;
        auto [p, c] = usable[gen.below(usable.size())];
        candidate = EdgeFailEvent{p, c};
        break;
      }
    }
    if (!candidate) continue;

    OnlineState trial = engine;
    try {
      HandlerOutcome outcome = trial.handle_event(*candidate);
      if (outcome.rejected) continue;
    } catch (const Error&) {
      continue;
    }
    // Generation-time guarantee that the optimum still exists for the
    // prefix, so downstream ratio computation never divides a void.
    if (solve_optimal(Snapshot::fresh(trial.graph())).status != SolveStatus::Optimal) continue;

    engine = std::move(trial);
    out.events.push_back(*candidate);
    ++accepted;
  }
  return out;
}

}  // namespace dynassign
