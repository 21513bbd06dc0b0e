import csv
import json
import math
import random

import pytest

from taskforge import ltl
from taskforge.buchi import accepts_lasso, restrict_reachable
from taskforge.cli import main
from taskforge.harness.bench import bench, write_csv, write_gnuplot
from taskforge.harness.generate import BenchConfig, generate_random
from taskforge.harness.pipeline import (advance_progress, current_behavior, progress_state,
                                        run_pipeline)
from taskforge.harness.scenario import (ScenarioError, load_scenario, loads_scenario,
                                        save_scenario, scenario_from_dict)
from taskforge.ltl import eval_lasso, parse_ltl

from helpers import SCENARIOS, random_lasso

SEC4 = SCENARIOS / "sec4.json"


def minimal(**changes):
    data = {
        "environment": {"regions": ["r1", "r2"],
                        "edges": [{"from": "r1", "to": "r2", "weight": 1},
                                  {"from": "r2", "to": "r1", "weight": 1},
                                  {"from": "r1", "to": "r1", "weight": 0},
                                  {"from": "r2", "to": "r2", "weight": 0}]},
        "capabilities": {},
        "robots": [{"id": 1, "capabilities": [], "initial": {"motion": "r1"},
                    "current_task": "G F r1", "progress_steps": 0}],
        "new_tasks": [],
    }
    data.update(changes)
    return data


@pytest.fixture(scope="module")
def sec4():
    return load_scenario(SEC4)


# -------------------------------------------------------------- scenarios

def test_minimal_scenario(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(minimal()))
    s = load_scenario(path)
    assert s.n == 1 and s.m == 0


def test_sec4_loads(sec4):
    assert sec4.n == 3 and sec4.m == 3
    assert len(sec4.regions) == 5
    assert sec4.robot(3).capabilities == ("arm", "camera")


def test_conflicting_new_tasks():
    with pytest.raises(ScenarioError, match="conflict"):
        scenario_from_dict(minimal(new_tasks=["G a", "G !a"]))


@pytest.mark.parametrize("change, pointer", [
    (dict(robots=[{"id": 1, "capabilities": ["laser"], "initial": {"motion": "r1"},
                   "current_task": "true"}]), "/robots/0/capabilities/0"),
    (dict(robots=[{"id": 1, "capabilities": [], "initial": {"motion": "r1"},
                   "current_task": "F (r1 &"}]), "/robots/0/current_task"),
    (dict(new_tasks=["F r1", "G U"]), "/new_tasks/1"),
    (dict(robots=[{"id": 2, "capabilities": [], "initial": {"motion": "r1"},
                   "current_task": "true"}]), "/robots/0/id"),
    (dict(robots=[{"id": 1, "capabilities": [], "initial": {"motion": "r9"},
                   "current_task": "true"}]), "/robots/0/initial/motion"),
    (dict(robots=[{"id": 1, "capabilities": [], "initial": {"motion": "r1"},
                   "current_task": "G !r1 & F r1"}]), "/robots/0/current_task"),
    (dict(environment={"regions": ["r1"], "edges": [{"from": "r1", "to": "r2", "weight": 1}]}),
     "/environment/edges/0/to"),
    (dict(environment={"regions": ["r1"], "edges": [{"from": "r1", "to": "r1", "weight": -1}]}),
     "/environment/edges/0/weight"),
])
def test_validation_errors(change, pointer):
    with pytest.raises(ScenarioError) as err:
        scenario_from_dict(minimal(**change))
    assert err.value.pointer == pointer


def test_ltl_error_carries_offset():
    with pytest.raises(ScenarioError, match="byte 8"):
        scenario_from_dict(minimal(new_tasks=["F (r1 & "]))


def test_invalid_json():
    with pytest.raises(ScenarioError, match="invalid JSON"):
        loads_scenario("{")


def test_round_trip(sec4, tmp_path):
    path = tmp_path / "copy.json"
    save_scenario(sec4, path)
    again = load_scenario(path)
    assert again == sec4
    assert again.dumps() == sec4.dumps()


# --------------------------------------------------------------- progress

def test_progress_zero_is_initial(sec4):
    for rid in (1, 2, 3):
        assert advance_progress(sec4, rid, 0) == sec4.current_automaton(rid).initial


def test_progress_is_periodic(sec4):
    for rid in (1, 2, 3):
        plan = current_behavior(sec4, rid)
        ell, period = len(plan.prefix) - 1, len(plan.cycle) - 1
        for t in range(ell, ell + period + 1):
            z = advance_progress(sec4, rid, t)
            assert z == advance_progress(sec4, rid, t + period)
            assert z == advance_progress(sec4, rid, t + 3 * period)


def test_residual_after_scanning_room_4(sec4):
    plan = current_behavior(sec4, 1)
    word = plan.word()
    # first step whose consumed letter has the robot scanning in room_4
    t = next(k for k in range(1, len(plan.prefix))
             if {"room_4", "scan"} <= word[k - 1])
    z = advance_progress(sec4, 1, t)
    residual = restrict_reachable(sec4.current_automaton(1), z)
    target = parse_ltl("F (room_1 & scan)")
    rng = random.Random(9)
    for _ in range(300):
        w = random_lasso(rng, ("room_1", "room_4", "scan"))
        assert accepts_lasso(residual, w) == eval_lasso(target, w)


def test_progress_state_matches_plan(sec4):
    for rid in (1, 2, 3):
        plan = current_behavior(sec4, rid)
        s, _ = progress_state(sec4, rid)
        assert s == plan.state_at(sec4.robot(rid).progress_steps)[0]


# --------------------------------------------------------------- pipeline

def test_pipeline_without_new_tasks():
    data = minimal()
    data["robots"].append({"id": 2, "capabilities": [], "initial": {"motion": "r2"},
                           "current_task": "F r1", "progress_steps": 0})
    s = scenario_from_dict(data)
    report = run_pipeline(s)
    assert report.token_assignment == [] and report.optimal_assignment == []
    assert report.token_cost == sum(t[frozenset()] for t in report.tables)
    for rid in (1, 2):
        assert report.behaviors[rid].cost == current_behavior(s, rid).cost


def test_sec4_pipeline(sec4):
    report = run_pipeline(sec4)
    assert report.token_complete
    assert report.token_cost == report.optimal_cost
    assert report.token_assignment == [1, 1, 2]


def test_final_behaviors_satisfy_their_tasks(sec4):
    report = run_pipeline(sec4)
    formulas = sec4.new_formulas()
    for rid, behavior in report.behaviors.items():
        mine = [formulas[j] for j, i in enumerate(report.token_assignment) if i == rid]
        _, z = progress_state(sec4, rid)
        w = behavior.word()
        assert eval_lasso(ltl.conjoin(mine), w)
        assert accepts_lasso(restrict_reachable(sec4.current_automaton(rid), z), w)


def test_only_armed_robot_gets_arm_tasks(sec4):
    data = json.loads(SEC4.read_text())
    data["robots"][0]["capabilities"] = ["scan"]
    data["robots"][0]["initial"].pop("arm", None)
    s = scenario_from_dict(data)
    report = run_pipeline(s)
    for j, text in enumerate(s.new_tasks):
        if "pick_up" in text or "pull_lever" in text or "drop_off" in text:
            assert report.token_assignment[j] in (0, 3)
            assert report.optimal_assignment[j] in (0, 3)


def test_parallel_tables_match(sec4):
    a = run_pipeline(sec4, workers=1, behaviors=False)
    b = run_pipeline(sec4, workers=2, behaviors=False)
    assert a.tables == b.tables and a.token_assignment == b.token_assignment


# -------------------------------------------------------------- generator

def test_generation_is_deterministic():
    config = BenchConfig(seed=3)
    a = generate_random(config, 3, 2, 5).dumps()
    b = generate_random(config, 3, 2, 5).dumps()
    assert a == b
    assert generate_random(config, 3, 2, 6).dumps() != a


def test_generate_single_robot():
    s = generate_random(BenchConfig(), 1, 1, 0)
    assert s.n == 1 and s.m == 1
    scenario_from_dict(json.loads(s.dumps()))


def test_generated_progress_within_prefix():
    s = generate_random(BenchConfig(seed=1), 4, 2, 0)
    for r in s.robots:
        assert 0 <= r.progress_steps < len(current_behavior(s, r.id).prefix)


def test_thirty_trials_run():
    config = BenchConfig(seed=0)
    for trial in range(30):
        s = generate_random(config, 5, 3, trial)
        report = run_pipeline(s, behaviors=False)
        assert len(report.token_assignment) == 3


def test_config_validation():
    with pytest.raises(ValueError):
        BenchConfig(robot_counts=[0])
    with pytest.raises(ValueError):
        BenchConfig(trials=0)
    with pytest.raises(ValueError):
        BenchConfig(capability_pool=["laser"])


def test_seed_override(tmp_path, monkeypatch):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"seed": 1, "trials": 2}))
    monkeypatch.setenv("TASKFORGE_SEED", "42")
    assert BenchConfig.load(path).seed == 42


# ------------------------------------------------------------------ bench

def test_bench_single_point(tmp_path):
    rows = bench(BenchConfig(robot_counts=[2], task_counts=[2], trials=1))
    assert len(rows) == 2
    data, agg = rows
    assert data["status"] == "ok" and agg["trial"] == "aggregate"
    path = tmp_path / "out.csv"
    write_csv(rows, path)
    with open(path) as fh:
        table = list(csv.DictReader(fh))
    assert list(table[0])[:10] == ["n", "m", "trial", "seed", "token_cost", "opt_cost",
                                   "token_ms", "opt_ms", "token_assigned", "opt_assigned"]
    assert len(table) == 2


def test_bench_costs_and_aggregates():
    config = BenchConfig(seed=5, robot_counts=[2, 3], task_counts=[2], trials=3)
    rows = bench(config)
    assert len(rows) == 2 * (3 + 1)
    for r in rows:
        if r["trial"] != "aggregate" and r["token_assigned"] == r["opt_assigned"] == r["m"]:
            assert r["token_cost"] >= r["opt_cost"] - 1e-9
    for r in rows:
        if r["trial"] == "aggregate":
            assert r["token_cost_min"] <= r["token_cost"] <= r["token_cost_max"]
    again = bench(config)
    strip = lambda rs: [{k: v for k, v in r.items() if "_ms" not in k} for r in rs]
    assert strip(rows) == strip(again)


def test_bench_records_failures(monkeypatch):
    import taskforge.harness.bench as bench_module

    def boom(*args):
        raise RuntimeError("no luck")
    monkeypatch.setattr(bench_module, "generate_random", boom)
    rows = bench(BenchConfig(trials=2))
    assert [r["status"] for r in rows[:2]] == ["error: RuntimeError: no luck"] * 2
    assert rows[2]["status"] == "ok 0/2"


def test_gnuplot_files(tmp_path):
    rows = bench(BenchConfig(robot_counts=[2], task_counts=[1], trials=2))
    write_gnuplot(rows, tmp_path / "plots")
    cost = (tmp_path / "plots" / "cost.dat").read_text().splitlines()
    assert cost[0].startswith("#") and len(cost) == 2
    assert len(cost[1].split()) == 8
    assert (tmp_path / "plots" / "plots.gp").exists()


# -------------------------------------------------------------------- CLI

def test_cli_check(capsys):
    assert main(["check", str(SEC4)]) == 0
    assert "3 robots" in capsys.readouterr().out


def test_cli_check_invalid(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(minimal(new_tasks=["G a", "G !a"])))
    assert main(["check", str(path)]) == 1
    assert "conflict" in capsys.readouterr().err


def test_cli_translate(tmp_path, capsys):
    assert main(["translate", "F p"]) == 0
    out = tmp_path / "a.hoa"
    assert main(["translate", "G F p", "--hoa", str(out)]) == 0
    assert out.read_text().startswith("HOA: v1")
    assert main(["translate", "F (p &"]) == 1
    assert "byte 6" in capsys.readouterr().err


def test_cli_plan(capsys):
    assert main(["plan", str(SEC4), "--robot", "1", "--task", "0"]) == 0
    assert "cost" in capsys.readouterr().out
    # robot 2 has no arm for the delivery task
    assert main(["plan", str(SEC4), "--robot", "2", "--task", "0"]) == 2
    assert main(["plan", str(SEC4), "--robot", "7", "--task", "all"]) == 1
    assert main(["plan", str(SEC4), "--robot", "1", "--task", "5"]) == 1


def test_cli_allocate(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["allocate", str(SEC4), "--json", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["token"]["alpha"] == report["optimal"]["alpha"]
    assert set(report["behaviors"]) == {"1", "2", "3"}
    assert main(["allocate", str(SEC4), "--skip-optimal"]) == 0
    assert "optimal" not in capsys.readouterr().out.split("token")[-1]


def test_cli_allocate_infeasible(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(minimal(new_tasks=["F r3_missing"])))
    assert main(["allocate", str(path)]) == 2


def test_cli_bench(tmp_path):
    config = tmp_path / "c.json"
    config.write_text(json.dumps({"robot_counts": [2], "task_counts": [1], "trials": 1}))
    out = tmp_path / "b.csv"
    assert main(["bench", "--config", str(config), "--out", str(out),
                 "--gnuplot", str(tmp_path / "g")]) == 0
    assert len(out.read_text().splitlines()) == 3


def test_cli_internal_error(monkeypatch):
    import taskforge.cli as cli

    def broken(path):
        raise ZeroDivisionError("oops")
    monkeypatch.setattr(cli, "load_scenario", broken)
    assert main(["check", str(SEC4)]) == 3
