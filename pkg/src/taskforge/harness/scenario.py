"""Scenario files: a shared environment, a capability library, robots with
their current tasks and progress, and the new sub-tasks.

The JSON layout::

    {
      "environment": {"regions": [...],
                      "edges": [{"from": r1, "to": r2, "weight": w}, ...]},
      "capabilities": {name: {"props": [...],
                              "states": [{"id": s, "label": [...]}, ...],
                              "edges": [{"from": s1, "to": s2, "weight": w}, ...],
                              "initial": s}},
      "robots": [{"id": 1, "capabilities": [names],
                  "initial": {"motion": region, name: state, ...},
                  "current_task": ltl, "progress_steps": t}, ...],
      "new_tasks": [ltl, ...]
    }

Environment edges are directed and self-loops must be listed explicitly.
Robot ids must be ``1..n`` in file order.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .. import ltl
from ..buchi import is_empty, translate
from ..ltl import LTLSyntaxError
from ..models import CapabilityTS, ModelError, compose_robot, motion_model


class ScenarioError(ValueError):
    """Invalid scenario; ``pointer`` is a JSON pointer to the offending
    value."""

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {message}")


@dataclass
class RobotSpec:
    id: int
    capabilities: tuple
    initial: dict
    current_task: str
    progress_steps: int = 0


@dataclass
class Scenario:
    regions: tuple
    edges: dict
    capabilities: dict
    robots: list
    new_tasks: list
    description: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.robots)

    @property
    def m(self) -> int:
        return len(self.new_tasks)

    def robot(self, robot_id: int) -> RobotSpec:
        if not 1 <= robot_id <= self.n:
            raise KeyError(f"no robot {robot_id}")
        return self.robots[robot_id - 1]

    def new_formulas(self) -> list:
        return [ltl.parse_ltl(t) for t in self.new_tasks]

    def current_formula(self, robot_id: int):
        return ltl.parse_ltl(self.robot(robot_id).current_task)

    def current_automaton(self, robot_id: int):
        return translate(self.current_formula(robot_id))

    def robot_model(self, robot_id: int):
        key = ("model", robot_id)
        if key not in self._cache:
            spec = self.robot(robot_id)
            motion = motion_model(self.regions, self.edges, spec.initial["motion"])
            caps = [self.capabilities[name].with_initial(
                        spec.initial.get(name, self.capabilities[name].initial))
                    for name in spec.capabilities]
            self._cache[key] = compose_robot(motion, caps, robot_id)
        return self._cache[key]

    def to_dict(self) -> dict:
        caps = {}
        for name, c in self.capabilities.items():
            caps[name] = {
                "props": sorted(c.props),
                "states": [{"id": s, "label": sorted(c.labels[s])} for s in c.states],
                "edges": [{"from": s, "to": t, "weight": w} for (s, t), w in c.weights.items()],
                "initial": c.initial,
            }
        out = {
            "environment": {
                "regions": list(self.regions),
                "edges": [{"from": s, "to": t, "weight": w} for (s, t), w in self.edges.items()],
            },
            "capabilities": caps,
            "robots": [{"id": r.id, "capabilities": list(r.capabilities),
                        "initial": dict(r.initial), "current_task": r.current_task,
                        "progress_steps": r.progress_steps} for r in self.robots],
            "new_tasks": list(self.new_tasks),
        }
        if self.description:
            out["description"] = self.description
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _expect(cond, pointer, message):
    if not cond:
        raise ScenarioError(pointer, message)


def _edges(items, pointer, states):
    _expect(isinstance(items, list), pointer, "expected a list of edges")
    edges = {}
    for k, e in enumerate(items):
        p = f"{pointer}/{k}"
        _expect(isinstance(e, dict) and {"from", "to", "weight"} <= e.keys(), p,
                "edge needs 'from', 'to' and 'weight'")
        _expect(e["from"] in states, f"{p}/from", f"unknown state {e['from']!r}")
        _expect(e["to"] in states, f"{p}/to", f"unknown state {e['to']!r}")
        w = e["weight"]
        _expect(isinstance(w, (int, float)) and not isinstance(w, bool) and w >= 0,
                f"{p}/weight", "weight must be a nonnegative number")
        edges[(e["from"], e["to"])] = float(w)
    return edges


def _parse_task(text, pointer):
    _expect(isinstance(text, str), pointer, "task must be an LTL string")
    try:
        return ltl.parse_ltl(text)
    except LTLSyntaxError as err:
        raise ScenarioError(pointer, str(err)) from err


def scenario_from_dict(data, check_progress: bool = True) -> Scenario:
    """Build and fully validate a scenario from decoded JSON."""
    _expect(isinstance(data, dict), "", "top level must be an object")
    for key in ("environment", "capabilities", "robots", "new_tasks"):
        _expect(key in data, f"/{key}", "missing")

    env = data["environment"]
    _expect(isinstance(env, dict), "/environment", "expected an object")
    regions = env.get("regions")
    _expect(isinstance(regions, list) and regions and all(isinstance(r, str) for r in regions),
            "/environment/regions", "expected a nonempty list of region names")
    edges = _edges(env.get("edges"), "/environment/edges", set(regions))
    try:
        motion_model(regions, edges, regions[0])
    except ModelError as err:
        raise ScenarioError("/environment", str(err)) from err

    library = {}
    _expect(isinstance(data["capabilities"], dict), "/capabilities", "expected an object")
    for name, c in data["capabilities"].items():
        p = f"/capabilities/{name}"
        _expect(name != "motion", p, "'motion' is reserved for the environment")
        _expect(isinstance(c, dict), p, "expected an object")
        for key in ("props", "states", "edges", "initial"):
            _expect(key in c, f"{p}/{key}", "missing")
        states = [s["id"] for s in c["states"]]
        labels = {s["id"]: s.get("label", []) for s in c["states"]}
        try:
            library[name] = CapabilityTS(name, c["props"], states, c["initial"],
                                         _edges(c["edges"], f"{p}/edges", set(states)), labels)
        except ModelError as err:
            raise ScenarioError(p, str(err)) from err

    robots = []
    _expect(isinstance(data["robots"], list), "/robots", "expected a list")
    for k, r in enumerate(data["robots"]):
        p = f"/robots/{k}"
        _expect(isinstance(r, dict), p, "expected an object")
        _expect(r.get("id") == k + 1, f"{p}/id", f"robot ids must be 1..n in order, expected {k + 1}")
        names = r.get("capabilities", [])
        for c, name in enumerate(names):
            _expect(name in library, f"{p}/capabilities/{c}", f"unknown capability {name!r}")
        initial = dict(r.get("initial", {}))
        _expect(initial.get("motion") in regions, f"{p}/initial/motion", "unknown region")
        for name, state in initial.items():
            if name == "motion":
                continue
            _expect(name in names, f"{p}/initial/{name}", "robot does not have this capability")
            _expect(state in library[name].states, f"{p}/initial/{name}", f"unknown state {state!r}")
        _parse_task(r.get("current_task"), f"{p}/current_task")
        steps = r.get("progress_steps", 0)
        _expect(isinstance(steps, int) and not isinstance(steps, bool) and steps >= 0,
                f"{p}/progress_steps", "must be a nonnegative integer")
        robots.append(RobotSpec(k + 1, tuple(names), initial, r["current_task"], steps))

    _expect(isinstance(data["new_tasks"], list), "/new_tasks", "expected a list")
    tasks = [_parse_task(t, f"/new_tasks/{j}") for j, t in enumerate(data["new_tasks"])]

    scenario = Scenario(tuple(regions), edges, library, robots, list(data["new_tasks"]),
                        data.get("description", ""))
    for r in robots:
        try:
            scenario.robot_model(r.id)
        except ModelError as err:
            raise ScenarioError(f"/robots/{r.id - 1}/capabilities", str(err)) from err

    if tasks and is_empty(translate(ltl.conjoin(tasks))):
        raise ScenarioError("/new_tasks", "the new sub-tasks conflict: no trace satisfies all of them")
    if check_progress:
        from .pipeline import current_behavior
        for r in robots:
            if current_behavior(scenario, r.id).is_empty:
                raise ScenarioError(f"/robots/{r.id - 1}/current_task",
                                    "robot cannot satisfy its current task")
    return scenario


def loads_scenario(text: str, **kwargs) -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ScenarioError("", f"invalid JSON at line {err.lineno} column {err.colno}: {err.msg}") from err
    return scenario_from_dict(data, **kwargs)


def load_scenario(path, **kwargs) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return loads_scenario(fh.read(), **kwargs)


def save_scenario(scenario: Scenario, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(scenario.dumps())
