"""Allocating new sub-tasks to robots from their satisfiability vectors and
cost tables.

Sub-tasks are 0-based list positions. An assignment ``alpha`` is a list
with one entry per sub-task: 0 means unassigned, ``i >= 1`` means robot
``i``, whose vector and table are ``sats[i - 1]`` and ``tables[i - 1]``.
Tables map frozensets of sub-task indices to costs; missing entries count
as infinite.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field


INF = math.inf


@dataclass
class AllocationStats:
    """Operation counters filled in by the allocators."""

    resolutions: int = 0
    split_evaluations: int = 0
    max_splits_per_resolution: int = 0
    candidates: int = 0


def robot_sets(alpha, n):
    """Per-robot task sets ``p_1 .. p_n`` induced by ``alpha``."""
    sets = [set() for _ in range(n)]
    for j, i in enumerate(alpha):
        if i:
            sets[i - 1].add(j)
    return [frozenset(s) for s in sets]


def total_cost(alpha, tables) -> float:
    """Sum over all robots of the cost of its assigned subset (the empty
    subset for idle robots)."""
    total = 0.0
    for table, p in zip(tables, robot_sets(alpha, len(tables))):
        total += table.get(p, INF)
    return total


def check_assignment(alpha, sats, tables):
    """Raise ``ValueError`` unless ``alpha`` respects satisfiability and has
    a finite cost for every robot that holds a task."""
    n = len(tables)
    for j, i in enumerate(alpha):
        if not 0 <= i <= n:
            raise ValueError(f"task {j}: robot index {i} out of range")
        if i and not sats[i - 1][j]:
            raise ValueError(f"task {j} assigned to robot {i}, which cannot do it")
    for i, p in enumerate(robot_sets(alpha, n), start=1):
        if p and tables[i - 1].get(p, INF) == INF:
            raise ValueError(f"robot {i} holds {sorted(p)} at infinite cost")


def update_assignment(assign_i, assign_k, satis_i, conflicts, gamma_i, gamma_k, stats=None):
    """Best way for robots ``i`` and ``k`` to split their combined tasks.

    Robot ``i`` may keep its own tasks and take any of ``conflicts``; robot
    ``k`` may keep its own tasks and take any of ``i``'s that it can do
    alone. Every task stays covered. Among splits where both robots have a
    finite cost, the cheapest combined one wins; ties go to the split that
    moves fewer tasks, then to the lexicographically smallest share for
    ``i``. Returns the new ``(tasks_i, tasks_k)``.
    """
    assign_i, assign_k = frozenset(assign_i), frozenset(assign_k)
    satis_i, conflicts = frozenset(satis_i), frozenset(conflicts)
    if assign_i & assign_k:
        raise ValueError("robots hold overlapping tasks")
    if conflicts != satis_i & assign_k:
        raise ValueError("conflicts must equal satis_i & assign_k")
    satis_k = frozenset(p for p in assign_i
                        if gamma_k.get(frozenset({p}), INF) < INF)
    movable = sorted(conflicts | satis_k)
    fixed_i = assign_i - satis_k
    fixed_k = assign_k - conflicts

    best = None
    count = 0
    for bits in itertools.product((False, True), repeat=len(movable)):
        to_i = {t for t, b in zip(movable, bits) if b}
        share_i = fixed_i | to_i
        share_k = fixed_k | (frozenset(movable) - to_i)
        count += 1
        cost_i = gamma_i.get(share_i, INF)
        cost_k = gamma_k.get(share_k, INF)
        if cost_i == INF or cost_k == INF:
            continue
        moved = len(share_i - assign_i) + len(share_k - assign_k)
        key = (cost_i + cost_k, moved, sorted(share_i))
        if best is None or key < best[0]:
            best = (key, share_i, share_k)
    if stats is not None:
        stats.resolutions += 1
        stats.split_evaluations += count
        stats.max_splits_per_resolution = max(stats.max_splits_per_resolution, count)
    if best is None:
        return assign_i, assign_k
    return best[1], best[2]


def _best_claim(free, gamma):
    """Largest subset of ``free`` with a finite cost in ``gamma``; ties go
    to the cheaper subset, then the lexicographically smaller one."""
    for size in range(len(free), 0, -1):
        options = [(gamma.get(frozenset(c), INF), c)
                   for c in itertools.combinations(free, size)]
        options = [o for o in options if o[0] < INF]
        if options:
            return min(options)[1]
    return ()


def token_allocate(sats, tables, m, observer=None, stats=None):
    """Single pass of the assignment token over robots ``1..n``.

    Each robot claims as many of the unassigned tasks it can do as its
    table allows at finite cost (the cheapest such set), then settles
    overlaps with every other robot holding a task it could do, at most
    once per robot per turn. ``observer(alpha)`` is called after every
    change.
    """
    n = len(tables)
    alpha = [0] * m

    def notify():
        if observer is not None:
            observer(list(alpha))

    for i in range(1, n + 1):
        sat_i, gamma_i = sats[i - 1], tables[i - 1]
        free = [j for j in range(m) if sat_i[j] and alpha[j] == 0]
        for j in _best_claim(free, gamma_i):
            alpha[j] = i
            notify()

        compared = set()
        satis_i = frozenset(p for p in range(m) if sat_i[p])
        for j in range(m):
            k = alpha[j]
            if not sat_i[j] or k == i or k == 0 or k in compared:
                continue
            assigned_i = frozenset(p for p in range(m) if alpha[p] == i)
            assigned_k = frozenset(p for p in range(m) if alpha[p] == k)
            conflicts = satis_i & assigned_k
            new_i, new_k = update_assignment(assigned_i, assigned_k, satis_i, conflicts,
                                             gamma_i, tables[k - 1], stats)
            for p in new_i:
                alpha[p] = i
            for p in new_k:
                alpha[p] = k
            compared.add(k)
            notify()
    return alpha


def optimal_allocate(sats, tables, m, stats=None):
    """Exhaustive search over all assignments consistent with ``sats``.

    Assignments covering more tasks always win; among those the minimum
    total cost, then the lexicographically smallest ``alpha``.
    """
    n = len(tables)
    options = [[0] + [i for i in range(1, n + 1) if sats[i - 1][j]] for j in range(m)]
    best = None
    count = 0
    for alpha in itertools.product(*options):
        count += 1
        sets = [[] for _ in range(n)]
        for j, i in enumerate(alpha):
            if i:
                sets[i - 1].append(j)
        cost = 0.0
        for table, p in zip(tables, sets):
            cost += table.get(frozenset(p), INF)
            if cost == INF:
                break
        if cost == INF:
            continue
        key = (alpha.count(0), cost, alpha)
        if best is None or key < best:
            best = key
    if stats is not None:
        stats.candidates += count
    if best is None:
        return None
    return list(best[2])


@dataclass
class AllocationReport:
    token_assignment: list
    token_cost: float
    token_time: float
    optimal_assignment: list = None
    optimal_cost: float = None
    optimal_time: float = None
    behaviors: dict = field(default_factory=dict)
    sats: list = field(default_factory=list)
    tables: list = field(default_factory=list)

    @property
    def m(self):
        return len(self.token_assignment)

    @property
    def token_complete(self) -> bool:
        return all(self.token_assignment)

    @property
    def unassigned(self) -> list:
        return [j for j, i in enumerate(self.token_assignment) if i == 0]
