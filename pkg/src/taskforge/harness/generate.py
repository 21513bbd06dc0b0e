"""Seeded random scenarios for benchmarking.

A trial is fully determined by ``(seed, n, m, trial)``: the environment is
a grid of rooms with random symmetric weights, each robot draws one to
three capabilities, a start room and a current task, and the new
sub-tasks are drawn from delivery / visit / recurring-visit templates.
"""
from __future__ import annotations

import json
import os
import random
from dataclasses import asdict, dataclass, field

from .scenario import ScenarioError, scenario_from_dict


CAPABILITY_POOL = {
    "arm": ["pick_up", "drop_off", "pull_lever"],
    "scan": ["scan"],
    "camera": ["use_camera"],
}

CURRENT_TEMPLATES = ("sequence", "patrol", "unordered")
NEW_TEMPLATES = ("deliver", "visit", "recur")


@dataclass
class BenchConfig:
    seed: int = 0
    robot_counts: list = field(default_factory=lambda: [3])
    task_counts: list = field(default_factory=lambda: [3])
    trials: int = 30
    grid: tuple = (2, 3)
    capability_pool: list = field(default_factory=lambda: sorted(CAPABILITY_POOL))
    max_capabilities: int = 3
    current_templates: list = field(default_factory=lambda: list(CURRENT_TEMPLATES))
    new_templates: list = field(default_factory=lambda: list(NEW_TEMPLATES))
    weight_range: tuple = (1.0, 2.0)
    action_weight: float = 0.5
    max_retries: int = 50

    def __post_init__(self):
        self.grid = tuple(self.grid)
        self.weight_range = tuple(self.weight_range)
        if not self.robot_counts or min(self.robot_counts) < 1:
            raise ValueError("robot counts must be >= 1")
        if not self.task_counts or min(self.task_counts) < 1:
            raise ValueError("task counts must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.grid[0] * self.grid[1] < 2:
            raise ValueError("grid needs at least two rooms")
        unknown = set(self.capability_pool) - set(CAPABILITY_POOL)
        if unknown:
            raise ValueError(f"unknown capabilities in pool: {sorted(unknown)}")
        lo, hi = self.weight_range
        if not 0 <= lo <= hi:
            raise ValueError("weight range must satisfy 0 <= low <= high")

    @classmethod
    def load(cls, path) -> "BenchConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        config = cls(**data)
        if "TASKFORGE_SEED" in os.environ:
            config.seed = int(os.environ["TASKFORGE_SEED"])
        return config

    def to_dict(self) -> dict:
        return asdict(self)


def _action_capability(props, weight):
    states = ["idle"] + props
    return {
        "props": props,
        "states": [{"id": s, "label": [] if s == "idle" else [s]} for s in states],
        "edges": [{"from": s, "to": t, "weight": 0.0 if t == "idle" else weight}
                  for s in states for t in states],
        "initial": "idle",
    }


def _environment(config, rng):
    rows, cols = config.grid
    name = {(r, c): f"room_{r * cols + c + 1}" for r in range(rows) for c in range(cols)}
    lo, hi = config.weight_range
    edges = [{"from": x, "to": x, "weight": 0.0} for x in name.values()]
    for (r, c), x in name.items():
        for nb in ((r, c + 1), (r + 1, c)):
            if nb in name:
                w = round(rng.uniform(lo, hi), 1)
                edges.append({"from": x, "to": name[nb], "weight": w})
                edges.append({"from": name[nb], "to": x, "weight": w})
    return {"regions": list(name.values()), "edges": edges}


def _current_task(kind, rooms, acts, rng):
    a, b = rng.sample(rooms, 2)
    x, y = rng.choice(acts), rng.choice(acts)
    if kind == "sequence":
        return f"(!({a} & {x}) U ({b} & {x})) & F ({a} & {x})"
    if kind == "patrol":
        return f"G F ({a} & {x}) & G F ({b} & {y})"
    return f"F ({a} & {x}) & F ({b} & {y})"


def _new_task(kind, rooms, pool, rng):
    if kind == "deliver" and "arm" in pool:
        a, b = rng.sample(rooms, 2)
        return f"(!drop_off U ({a} & pick_up)) & (!drop_off U ({b} & drop_off))"
    room = rng.choice(rooms)
    if kind == "recur":
        caps = rng.sample(pool, min(len(pool), rng.randint(1, 2)))
        acts = " & ".join(rng.choice(CAPABILITY_POOL[c]) for c in caps)
        return f"G F ({room} & {acts})"
    cap = rng.choice(pool)
    return f"F ({room} & {rng.choice(CAPABILITY_POOL[cap])})"


def _draw(config, n, m, rng):
    env = _environment(config, rng)
    rooms = env["regions"]
    pool = list(config.capability_pool)
    caps = {c: _action_capability(CAPABILITY_POOL[c], config.action_weight) for c in pool}
    robots = []
    for i in range(1, n + 1):
        k = rng.randint(1, min(config.max_capabilities, len(pool)))
        mine = sorted(rng.sample(pool, k))
        acts = [p for c in mine for p in CAPABILITY_POOL[c]]
        initial = {"motion": rng.choice(rooms)}
        initial.update({c: "idle" for c in mine})
        robots.append({
            "id": i,
            "capabilities": mine,
            "initial": initial,
            "current_task": _current_task(rng.choice(config.current_templates), rooms, acts, rng),
            "progress_steps": 0,
        })
    tasks = [_new_task(rng.choice(config.new_templates), rooms, pool, rng) for _ in range(m)]
    return {"environment": env, "capabilities": caps, "robots": robots, "new_tasks": tasks}


def generate_random(config: BenchConfig, n: int, m: int, trial: int):
    """Deterministic random scenario for one benchmark point and trial."""
    from .pipeline import current_behavior

    rng = random.Random(f"taskforge:{config.seed}:{n}:{m}:{trial}")
    last = None
    for _ in range(config.max_retries):
        data = _draw(config, n, m, rng)
        try:
            scenario = scenario_from_dict(data)
        except ScenarioError as err:
            last = (err, data)
            continue
        for r in scenario.robots:
            plan = current_behavior(scenario, r.id)
            r.progress_steps = rng.randint(0, len(plan.prefix) - 1)
        scenario.description = f"random seed={config.seed} n={n} m={m} trial={trial}"
        return scenario
    err, data = last
    raise RuntimeError(f"no valid scenario after {config.max_retries} draws; "
                       f"last failure: {err}; draw: {json.dumps(data)}")
