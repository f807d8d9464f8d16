#include "dynassign/adversary.hpp"
#include "dynassign/errors.hpp"
#include "dynassign/harness.hpp"
#include "dynassign/oracle.hpp"
#include "dynassign/snapshot.hpp"
#include "dynassign/trace_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace dynassign;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigInvalidError("cannot open '" + path + "' for writing");
  out << text;
}

RationalRange parse_range(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) {
    Rational v = parse_rational(text);
    return {v, v};
  }
  return {parse_rational(text.substr(0, colon)), parse_rational(text.substr(colon + 1))};
}

// Flags shared by gen and bench: a config file plus individual overrides.
struct ConfigFlags {
  std::string config_path;
  std::string scenario;
  std::optional<std::uint32_t> producers, consumers, events;
  std::string demand, distance, capacity;
  std::optional<std::uint64_t> seed;
  bool integer_draws = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file; flags below override it");
    cmd->add_option("--scenario", scenario,
                    "sorted_demands | distance_attack | failure_storm | uniform_random");
    cmd->add_option("--producers", producers, "producer count");
    cmd->add_option("--consumers", consumers, "consumer count");
    cmd->add_option("--demand", demand, "demand range lo:hi (rationals)");
    cmd->add_option("--distance", distance, "distance range lo:hi");
    cmd->add_option("--capacity", capacity, "capacity range lo:hi");
    cmd->add_option("--seed", seed, "generator seed")->envname("DYNASSIGN_SEED");
    cmd->add_option("--events", events, "extra event count (0 = producers + consumers)");
    cmd->add_flag("--integer", integer_draws, "draw integers instead of grid rationals");
  }

  AdversaryConfig build() const {
    AdversaryConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigInvalidError("cannot open config '" + config_path + "'");
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalidError("config '" + config_path + "': " + e.what());
      }
      cfg = config_from_json(j);
    }
    if (!scenario.empty()) cfg.scenario = scenario_from_name(scenario);
    if (producers) cfg.n_producers = *producers;
    if (consumers) cfg.n_consumers = *consumers;
    if (!demand.empty()) cfg.demand_range = parse_range(demand);
    if (!distance.empty()) cfg.distance_range = parse_range(distance);
    if (!capacity.empty()) cfg.capacity_range = parse_range(capacity);
    if (seed) cfg.seed = *seed;
    if (events) cfg.extra_events = *events;
    if (integer_draws) cfg.integer_draws = true;
    return cfg;
  }
};

int cmd_gen(const ConfigFlags& flags, const std::string& prior_path, const std::string& out_path) {
  AdversaryConfig cfg = flags.build();
  Trace trace;
  if (!prior_path.empty()) {
    Trace prior = read_trace_file(prior_path);
    switch (cfg.scenario) {
      case Scenario::DistanceAttack:
        trace = gen_distance_attack(cfg, prior);
        break;
      case Scenario::FailureStorm:
        trace = gen_failure_storm(cfg, prior);
        break;
      default:
        throw ConfigInvalidError("--prior only applies to distance_attack and failure_storm");
    }
  } else {
    trace = scenario_trace(cfg, cfg.seed);
  }
  std::ostringstream buf;
  write_trace(buf, trace);
  write_text(out_path, buf.str());
  return 0;
}

int cmd_run(const std::string& trace_path, const std::string& alg_name,
            std::optional<std::uint64_t> seed, const std::string& csv_path,
            const std::string& summary_path, bool timing) {
  Trace trace = read_trace_file(trace_path);
  if (seed) trace.rng_seed = *seed;
  AlgorithmId alg = algorithm_from_name(alg_name);

  auto started = std::chrono::steady_clock::now();
  RunMetrics metrics = replay(trace, alg);
  metrics.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  write_text(csv_path, metrics_to_csv(metrics));
  write_text(summary_path, metrics_summary_json(metrics, timing).dump(2) + "\n");
  return metrics.invariants_ok ? 0 : 1;
}

int cmd_oracle(const std::string& trace_path, std::optional<std::uint64_t> at,
               const std::string& method, const std::string& out_path,
               const std::string& iterations_path) {
  Trace trace = read_trace_file(trace_path);
  std::uint64_t upto = at.value_or(trace.events.size());
  if (upto > trace.events.size()) {
    throw ConfigInvalidError("--at " + std::to_string(upto) + " exceeds the trace's " +
                             std::to_string(trace.events.size()) + " events");
  }
  GraphState state = trace.initial;
  for (std::uint64_t k = 0; k < upto; ++k) state.apply_event(trace.events[k]);
  Snapshot snap = Snapshot::fresh(state);

  SolveResult result;
  if (method == "flow") {
    if (!iterations_path.empty()) {
      throw ConfigInvalidError("--iterations requires --method pd");
    }
    result = solve_optimal(snap);
  } else if (method == "pd") {
    AscentOptions opts;
    opts.keep_log = !iterations_path.empty();
    result = primal_dual_offline(snap, opts);
  } else {
    throw ConfigInvalidError("--method must be pd or flow");
  }

  write_text(out_path, solve_result_json(result).dump(2) + "\n");
  if (!iterations_path.empty()) write_text(iterations_path, iterations_to_csv(result));
  return 0;
}

int cmd_bench(const ConfigFlags& flags, const std::string& alg_name, std::uint32_t trials,
              unsigned threads, const std::string& out_path) {
  AdversaryConfig cfg = flags.build();
  AlgorithmId alg = algorithm_from_name(alg_name);
  MonteCarloSummary summary = monte_carlo(cfg, alg, trials, threads);
  write_text(out_path, monte_carlo_json(summary).dump(2) + "\n");
  return summary.invariants_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynassign: incremental weight assignment on dynamic bipartite graphs"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "Generate an adversarial trace");
  ConfigFlags gen_flags;
  gen_flags.attach(gen);
  std::string gen_prior, gen_out = "-";
  gen->add_option("--prior", gen_prior, "trace to extend (distance_attack, failure_storm)");
  gen->add_option("--out,-o", gen_out, "output trace path, - for stdout");

  auto* run = app.add_subcommand("run", "Replay a trace and report per-event metrics");
  std::string run_trace, run_alg = "online", run_csv = "-", run_summary = "-";
  std::optional<std::uint64_t> run_seed;
  bool run_timing = false;
  run->add_option("--trace", run_trace, "trace file")->required();
  run->add_option("--alg", run_alg, "online | offline_pd");
  run->add_option("--seed", run_seed, "override the trace's stored seed")->envname("DYNASSIGN_SEED");
  run->add_option("--csv", run_csv, "per-event CSV path, - for stdout");
  run->add_option("--summary", run_summary, "JSON summary path, - for stdout");
  run->add_flag("--timing", run_timing, "include wall-clock runtime in the summary");

  auto* oracle = app.add_subcommand("oracle", "Solve the optimum for a trace prefix");
  std::string oracle_trace, oracle_method = "pd", oracle_out = "-", oracle_iters;
  std::optional<std::uint64_t> oracle_at;
  oracle->add_option("--trace", oracle_trace, "trace file")->required();
  oracle->add_option("--at", oracle_at, "prefix length in events (default: whole trace)");
  oracle->add_option("--method", oracle_method, "pd (dual ascent) | flow (shortest paths)");
  oracle->add_option("--out,-o", oracle_out, "result JSON path, - for stdout");
  oracle->add_option("--iterations", oracle_iters, "per-iteration CSV (pd only)");

  auto* bench = app.add_subcommand("bench", "Monte-Carlo ratio experiments");
  ConfigFlags bench_flags;
  bench_flags.attach(bench);
  std::string bench_alg = "online", bench_out = "-";
  std::uint32_t bench_trials = 100;
  unsigned bench_threads = 0;
  bench->add_option("--alg", bench_alg, "online | offline_pd");
  bench->add_option("--trials", bench_trials, "number of independent trials");
  bench->add_option("--threads", bench_threads, "worker threads, 0 = hardware");
  bench->add_option("--out,-o", bench_out, "summary JSON path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_flags, gen_prior, gen_out);
    if (run->parsed()) return cmd_run(run_trace, run_alg, run_seed, run_csv, run_summary, run_timing);
    if (oracle->parsed()) {
      return cmd_oracle(oracle_trace, oracle_at, oracle_method, oracle_out, oracle_iters);
    }
    if (bench->parsed()) return cmd_bench(bench_flags, bench_alg, bench_trials, bench_threads, bench_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
