#include "dynassign/harness.hpp"

#include "dynassign/approx.hpp"
#include "dynassign/errors.hpp"
#include "dynassign/online.hpp"
#include "dynassign/oracle.hpp"
#include "dynassign/rng.hpp"
#include "dynassign/snapshot.hpp"

#include <atomic>
#include <sstream>
#include <thread>
#include <variant>

namespace dynassign {

namespace {

// Every distance value the trace can expose: the initial usable edges plus
// any distance carried by later events. Returns {d_min, d_max} or nothing.
std::optional<std::pair<Rational, Rational>> distance_extremes(const Trace& trace) {
  std::optional<std::pair<Rational, Rational>> ext;
  auto feed = [&](const Rational& d) {
    if (!ext) {
      ext = {d, d};
      return;
    }
    if (d < ext->first) ext->first = d;
    if (d > ext->second) ext->second = d;
  };
  const GraphState& g = trace.initial;
  for (const auto& p : g.producers()) {
    for (const auto& c : g.consumers()) {
      if (g.edge_usable(p.id, c.id)) feed(g.edge(p.id, c.id).distance);
    }
  }
  for (const auto& event : trace.events) {
    if (const auto* dc = std::get_if<DistanceChangeEvent>(&event)) {
      feed(dc->new_distance);
    } else if (const auto* er = std::get_if<EdgeRestoreEvent>(&event)) {
      feed(er->distance);
    } else if (const auto* ca = std::get_if<ConsumerAddEvent>(&event)) {
      for (const auto& d : ca->distances) feed(d);
    }
  }
  return ext;
}

std::optional<Rational> trace_bound(const Trace& trace) {
  std::size_t consumers = 0;
  for (const auto& c : trace.initial.consumers()) {
    if (c.alive) ++consumers;
  }
  for (const auto& event : trace.events) {
    if (std::holds_alternative<ConsumerAddEvent>(event)) ++consumers;
  }
  auto ext = distance_extremes(trace);
  if (!ext || consumers == 0 || ext->first <= 0) return std::nullopt;
  return ratio_bound(ext->second, ext->first, static_cast<std::uint32_t>(consumers));
}

Trace demand_trace(const Snapshot& snap, std::uint64_t seed) {
  std::vector<Rational> caps;
  caps.reserve(snap.consumers.size());
  for (const auto& col : snap.consumers) caps.push_back(col.residual);
  Trace trace;
  trace.initial = GraphState::complete(snap.producers.size(), std::move(caps), snap.distance);
  trace.rng_seed = seed;
  trace.events.reserve(snap.producers.size());
  for (std::size_t i = 0; i < snap.producers.size(); ++i) {
    trace.events.push_back(
        DemandEvent{ProducerId{static_cast<std::uint32_t>(i)}, snap.producers[i].remaining});
  }
  return trace;
}

std::string decimal_or_empty(const std::optional<Rational>& r) {
  return r ? to_decimal_string(*r, 12) : std::string();
}

void put_optional(nlohmann::ordered_json& j, const char* key, const std::optional<Rational>& r) {
  if (r) {
    j[key] = format_rational(*r);
    j[std::string(key) + "_decimal"] = decimal_or_empty(r);
  } else {
    j[key] = nullptr;
    j[std::string(key) + "_decimal"] = nullptr;
  }
}

}  // namespace

std::string algorithm_name(AlgorithmId alg) {
  return alg == AlgorithmId::OfflinePD ? "offline_pd" : "online";
}

AlgorithmId algorithm_from_name(const std::string& name) {
  if (name == "online") return AlgorithmId::Online;
  if (name == "offline_pd" || name == "offline-pd" || name == "offline" || name == "pd") {
    return AlgorithmId::OfflinePD;
  }
  throw ConfigInvalidError("unknown algorithm '" + name + "'");
}

Rational ratio_bound(const Rational& d_max, const Rational& d_min, std::uint32_t n_consumers) {
  if (d_min <= 0) throw DomainError("ratio bound needs d_min > 0");
  if (n_consumers < 1) throw DomainError("ratio bound needs at least one consumer");
  if (n_consumers == 1) return Rational(0);
  return Rational(d_max / d_min) * ln_upper(n_consumers);
}

RunMetrics replay(const Trace& trace, AlgorithmId algorithm) {
  RunMetrics rm;
  rm.seed = trace.rng_seed;
  rm.algorithm = algorithm;
  rm.bound = trace_bound(trace);

  // Accepted-prefix state fed to the oracle; never touched by algorithms.
  GraphState shadow = trace.initial;
  std::optional<OnlineState> engine;
  if (algorithm == AlgorithmId::Online) engine.emplace(trace);

  Rational last_alg = algorithm == AlgorithmId::Online ? engine->graph().objective_cost()
                                                       : trace.initial.objective_cost();
  std::uint64_t pd_ops = 0;
  Rational ratio_sum;
  std::size_t ratio_count = 0;

  for (std::size_t k = 0; k < trace.events.size(); ++k) {
    const ServiceRequest& event = trace.events[k];
    EventRecord rec;
    rec.clock = k + 1;
    rec.kind = event_kind(event);

    try {
      if (algorithm == AlgorithmId::Online) {
        HandlerOutcome outcome = engine->handle_event(event);
        rec.accepted = !outcome.rejected.has_value();
        rec.alg_cost = outcome.cost_after;
        rec.op_count = engine->op_counter();
      } else {
        GraphState scratch = shadow;
        scratch.apply_event(event);
        SolveResult solved = primal_dual_offline(Snapshot::fresh(scratch));
        pd_ops += solved.iterations;
        rec.op_count = pd_ops;
        rec.accepted = solved.status == SolveStatus::Optimal;
        rec.alg_cost = rec.accepted ? solved.cost : last_alg;
      }
      if (rec.accepted) shadow.apply_event(event);
    } catch (const Error& e) {
      throw TraceInvalidError("event " + std::to_string(k + 1) + ": " + e.what());
    }

    SolveResult opt = solve_optimal(Snapshot::fresh(shadow));
    if (opt.status == SolveStatus::Optimal) {
      rec.opt_cost = opt.cost;
    } else {
      rm.invariants_ok = false;
      rm.violations.push_back("event " + std::to_string(k + 1) +
                              ": accepted prefix has no feasible optimum");
    }

    if (rec.opt_cost > 0) {
      rec.ratio = rec.alg_cost / rec.opt_cost;
      ratio_sum += *rec.ratio;
      ++ratio_count;
      if (!rm.max_ratio || *rec.ratio > *rm.max_ratio) rm.max_ratio = rec.ratio;
    }

    if (rec.alg_cost < rec.opt_cost) {
      rm.invariants_ok = false;
      rm.violations.push_back("event " + std::to_string(k + 1) +
                              ": algorithm cost below the exact optimum");
    }
    if (engine) {
      if (!engine->dual().feasible_for(engine->graph())) {
        rm.invariants_ok = false;
        rm.violations.push_back("event " + std::to_string(k + 1) + ": dual constraint violated");
      }
      if (!engine->graph().check_feasibility().empty()) {
        rm.invariants_ok = false;
        rm.violations.push_back("event " + std::to_string(k + 1) + ": infeasible assignment");
      }
      for (const auto& problem : engine->graph().validate_structure()) {
        rm.invariants_ok = false;
        rm.violations.push_back("event " + std::to_string(k + 1) + ": " + problem);
      }
    }

    last_alg = rec.alg_cost;
    rm.records.push_back(std::move(rec));
  }

  if (ratio_count > 0) rm.mean_ratio = ratio_sum / Rational(ratio_count);
  return rm;
}

Trace scenario_trace(const AdversaryConfig& cfg, std::uint64_t trial_seed) {
  AdversaryConfig c = cfg;
  c.seed = trial_seed;
  switch (cfg.scenario) {
    case Scenario::SortedDemands:
      return gen_sorted_demands(c);
    case Scenario::UniformRandom:
      return demand_trace(gen_random_instance(c), trial_seed);
    case Scenario::DistanceAttack: {
      AdversaryConfig base = c;
      base.scenario = Scenario::SortedDemands;
      Trace prior = gen_sorted_demands(base);
      c.seed = mix_seed(trial_seed, 1);
      return gen_distance_attack(c, prior);
    }
    case Scenario::FailureStorm: {
      AdversaryConfig base = c;
      base.scenario = Scenario::UniformRandom;
      Trace prior = demand_trace(gen_random_instance(base), trial_seed);
      c.seed = mix_seed(trial_seed, 1);
      return gen_failure_storm(c, prior);
    }
  }
  throw ConfigInvalidError("unknown scenario value");
}

MonteCarloSummary monte_carlo(const AdversaryConfig& cfg, AlgorithmId algorithm,
                              std::uint32_t trials, unsigned threads) {
  if (trials < 1) throw ConfigInvalidError("monte carlo needs at least one trial");
  validate(cfg, cfg.scenario);

  std::vector<RunMetrics> results(trials);
  std::vector<std::string> failures(trials);
  std::atomic<std::uint32_t> next{0};
  auto worker = [&] {
    for (std::uint32_t k = next.fetch_add(1); k < trials; k = next.fetch_add(1)) {
      std::uint64_t trial_seed = mix_seed(cfg.seed, k);
      try {
        results[k] = replay(scenario_trace(cfg, trial_seed), algorithm);
        results[k].seed = trial_seed;
      } catch (const Error& e) {
        failures[k] = e.what();
      } catch (const std::exception& e) {
        failures[k] = e.what();
      }
    }
  };

  unsigned want = threads ? threads : std::thread::hardware_concurrency();
  if (want == 0) want = 1;
  if (want > trials) want = trials;
  if (want <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(want);
    for (unsigned i = 0; i < want; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::uint32_t k = 0; k < trials; ++k) {
    if (!failures[k].empty()) {
      throw ConfigInvalidError("trial " + std::to_string(k) + " failed: " + failures[k]);
    }
  }

  MonteCarloSummary summary;
  summary.seed = cfg.seed;
  summary.algorithm = algorithm;
  summary.trials = trials;
  Rational mean_sum;
  std::size_t mean_count = 0;
  std::uint32_t violations = 0;
  for (const RunMetrics& m : results) {
    summary.total_events += m.records.size();
    for (const auto& rec : m.records) {
      if (rec.accepted) ++summary.total_accepted;
    }
    if (!m.invariants_ok) summary.invariants_ok = false;
    if (m.max_ratio) {
      mean_sum += *m.max_ratio;
      ++mean_count;
      if (!summary.max_ratio || *m.max_ratio > *summary.max_ratio) summary.max_ratio = m.max_ratio;
    }
    // Bound zero means a single consumer; the published formula is vacuous
    // there, so those trials are reported but not judged.
    if (m.bound && *m.bound > 0 && m.max_ratio) {
      ++summary.bound_checked_trials;
      if (*m.max_ratio > *m.bound) ++violations;
    }
  }
  if (mean_count > 0) summary.mean_max_ratio = mean_sum / Rational(mean_count);
  summary.violation_fraction = Rational(violations, trials);
  return summary;
}

std::string metrics_to_csv(const RunMetrics& metrics) {
  std::ostringstream out;
  out << "# seed=" << metrics.seed << " algorithm=" << algorithm_name(metrics.algorithm) << "\n";
  out << "clock,event,accepted,alg_cost,opt_cost,ratio,op_count\n";
  for (const auto& r : metrics.records) {
    out << r.clock << ',' << r.kind << ',' << (r.accepted ? 1 : 0) << ','
        << format_rational(r.alg_cost) << ',' << format_rational(r.opt_cost) << ','
        << (r.ratio ? format_rational(*r.ratio) : std::string()) << ',' << r.op_count << '\n';
  }
  return out.str();
}

nlohmann::ordered_json metrics_summary_json(const RunMetrics& metrics, bool include_runtime) {
  nlohmann::ordered_json j;
  j["seed"] = std::to_string(metrics.seed);
  j["algorithm"] = algorithm_name(metrics.algorithm);
  j["events"] = metrics.records.size();
  std::size_t accepted = 0;
  for (const auto& r : metrics.records) {
    if (r.accepted) ++accepted;
  }
  j["accepted"] = accepted;
  if (!metrics.records.empty()) {
    j["final_alg_cost"] = format_rational(metrics.records.back().alg_cost);
    j["final_opt_cost"] = format_rational(metrics.records.back().opt_cost);
  } else {
    j["final_alg_cost"] = nullptr;
    j["final_opt_cost"] = nullptr;
  }
  put_optional(j, "max_ratio", metrics.max_ratio);
  put_optional(j, "mean_ratio", metrics.mean_ratio);
  put_optional(j, "bound", metrics.bound);
  j["invariants_ok"] = metrics.invariants_ok;
  j["violations"] = metrics.violations;
  if (include_runtime) j["runtime_seconds"] = metrics.runtime_seconds;
  return j;
}

nlohmann::ordered_json solve_result_json(const SolveResult& result) {
  nlohmann::ordered_json j;
  j["status"] = result.status == SolveStatus::Optimal ? "optimal" : "infeasible";
  j["cost"] = format_rational(result.cost);
  j["cost_decimal"] = to_decimal_string(result.cost, 12);
  j["added_cost"] = format_rational(result.added_cost);
  j["iterations"] = result.iterations;
  j["work"] = result.work;
  auto weights = [](const Assignment& a) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [key, w] : a.entries()) {
      nlohmann::ordered_json row;
      row["producer"] = key.first;
      row["consumer"] = key.second;
      row["weight"] = format_rational(w);
      arr.push_back(std::move(row));
    }
    return arr;
  };
  j["assignment"] = weights(result.assignment);
  j["added"] = weights(result.added);
  if (result.certificate) {
    nlohmann::ordered_json cert;
    auto potentials = [](const std::map<std::uint32_t, Rational>& side) {
      nlohmann::ordered_json obj;
      for (const auto& [id, v] : side) obj[std::to_string(id)] = format_rational(v);
      return obj;
    };
    cert["y"] = potentials(result.certificate->y);
    cert["z"] = potentials(result.certificate->z);
    auto tight = nlohmann::ordered_json::array();
    for (const auto& [p, c] : result.certificate->tight_set) {
      tight.push_back(nlohmann::ordered_json::array({p, c}));
    }
    cert["tight"] = std::move(tight);
    j["certificate"] = std::move(cert);
  } else {
    j["certificate"] = nullptr;
  }
  return j;
}

std::string iterations_to_csv(const SolveResult& result) {
  std::ostringstream out;
  out << "index,action,producer,request,delta,dual_objective,primal_cost,"
         "dual_feasible,weights_on_tight_edges\n";
  for (const auto& r : result.log) {
    out << r.index << ',' << r.action << ',' << r.producer << ',' << r.request << ','
        << format_rational(r.delta) << ',' << format_rational(r.dual_objective) << ','
        << format_rational(r.primal_cost) << ',' << (r.dual_feasible ? 1 : 0) << ','
        << (r.weights_on_tight_edges ? 1 : 0) << '\n';
  }
  return out.str();
}

nlohmann::ordered_json monte_carlo_json(const MonteCarloSummary& summary) {
  nlohmann::ordered_json j;
  j["seed"] = std::to_string(summary.seed);
  j["algorithm"] = algorithm_name(summary.algorithm);
  j["trials"] = summary.trials;
  j["total_events"] = summary.total_events;
  j["total_accepted"] = summary.total_accepted;
  put_optional(j, "mean_max_ratio", summary.mean_max_ratio);
  put_optional(j, "max_ratio", summary.max_ratio);
  j["bound_checked_trials"] = summary.bound_checked_trials;
  j["violation_fraction"] = format_rational(summary.violation_fraction);
  j["invariants_ok"] = summary.invariants_ok;
  return j;
}

}  // namespace dynassign
