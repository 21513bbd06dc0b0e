"""Weighted transition systems for capabilities and robots.

A robot is the synchronous product of its motion model and its
capabilities: every component moves on each step, the step costs the sum of
the component costs, and the composite label is the union of the component
labels.
"""
from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Mapping, Sequence

import numpy as np


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class CapabilityTS:
    """``(props, states, initial, R, labels, W)``; ``weights`` maps each
    transition ``(s, s2)`` to its cost and so also defines ``R``."""

    name: str
    props: frozenset
    states: tuple
    initial: Hashable
    weights: Mapping
    labels: Mapping

    def __post_init__(self):
        object.__setattr__(self, "props", frozenset(self.props))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "labels",
                           {s: frozenset(self.labels.get(s, ())) for s in self.states})
        object.__setattr__(self, "weights", {tuple(t): float(w) for t, w in self.weights.items()})
        states = set(self.states)
        if len(states) != len(self.states):
            raise ModelError(f"{self.name}: duplicate states")
        if self.initial not in states:
            raise ModelError(f"{self.name}: initial state {self.initial!r} is not a state")
        for (s, t), w in self.weights.items():
            if s not in states or t not in states:
                raise ModelError(f"{self.name}: transition {s!r}->{t!r} has an unknown endpoint")
            if not (w >= 0 and math.isfinite(w)):
                raise ModelError(f"{self.name}: weight of {s!r}->{t!r} must be finite and >= 0")
        for s, label in self.labels.items():
            if not label <= self.props:
                raise ModelError(f"{self.name}: label of {s!r} uses unknown propositions "
                                 f"{sorted(label - self.props)}")
        sources = {s for s, _ in self.weights}
        stuck = [s for s in self.states if s not in sources]
        if stuck:
            raise ModelError(f"{self.name}: states without successors: {stuck}")

    @cached_property
    def out(self) -> dict:
        table = {s: [] for s in self.states}
        for (s, t), w in self.weights.items():
            table[s].append((t, w))
        return table

    def with_initial(self, state) -> "CapabilityTS":
        return dataclasses.replace(self, initial=state)


def motion_model(regions: Sequence[str], edges: Mapping, initial, name: str = "motion"):
    """Motion capability whose states are regions labelled by their own name."""
    return CapabilityTS(name, frozenset(regions), tuple(regions), initial,
                        edges, {r: {r} for r in regions})


@dataclass(frozen=True)
class RobotModel:
    robot_id: int
    components: tuple
    props: frozenset
    states: tuple
    initial: tuple
    weights: dict
    labels: dict

    @cached_property
    def out(self) -> dict:
        table = {s: [] for s in self.states}
        for (s, t), w in self.weights.items():
            table[s].append((t, w))
        return table

    @cached_property
    def state_index(self) -> dict:
        return {s: k for k, s in enumerate(self.states)}

    @cached_property
    def edge_arrays(self):
        """``(src, dst, weight)`` numpy arrays over state positions."""
        idx = self.state_index
        pairs = list(self.weights.items())
        src = np.fromiter((idx[s] for (s, _), _ in pairs), dtype=np.int64, count=len(pairs))
        dst = np.fromiter((idx[t] for (_, t), _ in pairs), dtype=np.int64, count=len(pairs))
        w = np.fromiter((x for _, x in pairs), dtype=float, count=len(pairs))
        return src, dst, w

    def with_initial(self, state) -> "RobotModel":
        state = tuple(state)
        if state not in self.labels:
            raise ModelError(f"robot {self.robot_id}: unknown state {state!r}")
        return dataclasses.replace(self, initial=state)

    def component_index(self, name: str) -> int:
        for k, c in enumerate(self.components):
            if c.name == name:
                return k
        raise KeyError(name)


def compose_robot(motion: CapabilityTS, caps: Sequence[CapabilityTS], robot_id: int) -> RobotModel:
    """Product ``motion x caps[0] x ... x caps[-1]``."""
    components = (motion, *caps)
    owner = {}
    for c in components:
        for p in c.props:
            if p in owner:
                raise ModelError(f"proposition {p!r} appears in both {owner[p]!r} and {c.name!r}")
            owner[p] = c.name

    states = tuple(itertools.product(*(c.states for c in components)))
    labels = {s: frozenset().union(*(c.labels[x] for c, x in zip(components, s)))
              for s in states}
    weights = {}
    for s in states:
        options = [c.out[x] for c, x in zip(components, s)]
        for combo in itertools.product(*options):
            target = tuple(t for t, _ in combo)
            weights[(s, target)] = sum(w for _, w in combo)
    initial = tuple(c.initial for c in components)
    return RobotModel(robot_id, components, frozenset(owner), states, initial, weights, labels)
