"""End-to-end runs: robot progress at the moment new tasks arrive, cost
tables, both allocators, and the final per-robot behaviors."""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor

from .. import ltl
from ..allocation import AllocationReport, optimal_allocate, token_allocate, total_cost
from ..synthesis import compute_sat_cost, synthesize_behavior


def current_behavior(scenario, robot_id):
    """The robot's plan for its current task from its initial state."""
    key = ("current", robot_id)
    if key not in scenario._cache:
        a = scenario.robot_model(robot_id)
        b = scenario.current_automaton(robot_id)
        scenario._cache[key], _ = synthesize_behavior(a, b.initial, b, ltl.TRUE)
    return scenario._cache[key]


def progress_state(scenario, robot_id, steps=None):
    """``(robot state, current-task automaton state)`` after ``steps`` plan
    steps (the robot's ``progress_steps`` by default)."""
    if steps is None:
        steps = scenario.robot(robot_id).progress_steps
    plan = current_behavior(scenario, robot_id)
    if plan.is_empty:
        raise ValueError(f"robot {robot_id} cannot satisfy its current task")
    s, q = plan.state_at(steps)
    # plan automaton is (true-automaton x current-task automaton)
    return s, plan.automaton.info[q].right


def advance_progress(scenario, robot_id, steps):
    """Current-task automaton state of the robot after ``steps`` plan steps."""
    return progress_state(scenario, robot_id, steps)[1]


def _robot_tables(args):
    scenario, robot_id = args
    s, z = progress_state(scenario, robot_id)
    a = scenario.robot_model(robot_id).with_initial(s)
    return compute_sat_cost(a, z, scenario.current_automaton(robot_id), scenario.new_formulas())


def robot_tables(scenario, workers=1):
    """``(sats, tables)`` for every robot, optionally in worker processes."""
    jobs = [(scenario, r.id) for r in scenario.robots]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_robot_tables, jobs))
    else:
        results = [_robot_tables(job) for job in jobs]
    return [r[0] for r in results], [r[1] for r in results]


def final_behavior(scenario, robot_id, tasks):
    """Behavior for the robot's remaining current task plus ``tasks``
    (0-based sub-task indices)."""
    s, z = progress_state(scenario, robot_id)
    a = scenario.robot_model(robot_id).with_initial(s)
    formulas = scenario.new_formulas()
    phi = ltl.conjoin(formulas[j] for j in sorted(tasks))
    behavior, _ = synthesize_behavior(a, z, scenario.current_automaton(robot_id), phi)
    return behavior


def allocate(sats, tables, m, skip_optimal=False):
    """Run both allocators on precomputed tables; times cover the allocator
    calls only."""
    t0 = time.perf_counter()
    alpha = token_allocate(sats, tables, m)
    token_time = time.perf_counter() - t0
    report = AllocationReport(alpha, total_cost(alpha, tables), token_time,
                              sats=sats, tables=tables)
    if not skip_optimal:
        t0 = time.perf_counter()
        best = optimal_allocate(sats, tables, m)
        report.optimal_time = time.perf_counter() - t0
        report.optimal_assignment = best
        report.optimal_cost = total_cost(best, tables) if best is not None else float("inf")
    return report


def run_pipeline(scenario, skip_optimal=False, workers=1, behaviors=True):
    sats, tables = robot_tables(scenario, workers)
    report = allocate(sats, tables, scenario.m, skip_optimal)
    if behaviors:
        alpha = report.token_assignment
        for r in scenario.robots:
            tasks = [j for j, i in enumerate(alpha) if i == r.id]
            report.behaviors[r.id] = final_behavior(scenario, r.id, tasks)
    return report
