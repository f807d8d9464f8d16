import json
import math
from fractions import Fraction

import pytest

import dynassign


def sorted_config(seed=21):
    cfg = json.loads(dynassign.default_config())
    cfg.update(
        {
            "scenario": "sorted_demands",
            "n_producers": 6,
            "n_consumers": 3,
            "demand_range": ["1", "9"],
            "distance_range": ["1", "4"],
            "seed": str(seed),
        }
    )
    return json.dumps(cfg)


def test_generate_is_deterministic():
    trace = dynassign.generate_trace(sorted_config())
    assert trace.splitlines()[0].startswith('{"record":"init"')
    assert len(trace.splitlines()) == 7  # init line plus six demand events
    assert trace == dynassign.generate_trace(sorted_config())
    assert trace != dynassign.generate_trace(sorted_config(seed=22))


def test_replay_reports_ratios_and_invariants():
    trace = dynassign.generate_trace(sorted_config())
    summary = json.loads(dynassign.replay_summary(trace, "online"))
    assert summary["invariants_ok"] is True
    assert summary["events"] == 6
    assert summary["accepted"] == 6
    assert Fraction(summary["max_ratio"]) >= 1
    assert Fraction(summary["max_ratio"]) <= Fraction(summary["bound"])

    csv = dynassign.replay_csv(trace, "offline_pd")
    lines = csv.splitlines()
    assert lines[1] == "clock,event,accepted,alg_cost,opt_cost,ratio,op_count"
    assert len(lines) == 8


def test_solver_routes_agree():
    trace = dynassign.generate_trace(sorted_config())
    pd = json.loads(dynassign.solve_prefix(trace, method="pd"))
    flow = json.loads(dynassign.solve_prefix(trace, method="flow"))
    assert pd["status"] == "optimal"
    assert flow["status"] == "optimal"
    assert pd["cost"] == flow["cost"]
    assert pd["certificate"] is not None
    assert flow["certificate"] is None

    log = dynassign.solve_iterations_csv(trace, 3)
    assert log.startswith("index,action,producer")

    state = json.loads(dynassign.state_at(trace, 2))
    assert state["clock"] == 2


def test_bench_small():
    summary = json.loads(dynassign.bench(sorted_config(), "online", 4, 1))
    assert summary["trials"] == 4
    assert summary["invariants_ok"] is True
    assert summary["violation_fraction"] == "0"


def test_ratio_bound_matches_log():
    got = Fraction(dynassign.ratio_bound("4", "1", 8))
    assert math.isclose(float(got), 4 * math.log(8), rel_tol=0, abs_tol=1e-6)
    assert Fraction(dynassign.ratio_bound("2", "2", 1)) == 0


def test_errors_surface_as_exceptions():
    with pytest.raises(Exception):
        dynassign.generate_trace(
            '{"scenario": "sorted_demands", "n_producers": 1, "n_consumers": 2}'
        )
    with pytest.raises(Exception):
        dynassign.solve_prefix("not a trace")
    with pytest.raises(Exception):
        dynassign.replay_summary(dynassign.generate_trace(sorted_config()), "simplex")
