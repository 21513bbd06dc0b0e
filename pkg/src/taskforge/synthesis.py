"""Behavior synthesis on the product of a robot model and a Buchi automaton,
and per-robot satisfiability / cost tables for a set of new sub-tasks."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components, dijkstra

from . import ltl
from .buchi import BuchiAutomaton, intersect, restrict_reachable, translate
from .ltl import Formula, LassoWord
from .models import RobotModel


@dataclass
class ProductGraph:
    """Weighted graph with accepting nodes; node 0 is initial.

    For a product ``robot x automaton`` (see :func:`build_product`) node
    ``q`` stands for ``state(q) == (robot state, automaton state)`` and is
    labelled ``label(q) == labels(robot state) & automaton.props``; nodes
    are numbered in breadth-first order from the initial node. A step into
    robot state ``s2`` reads the letter ``label`` of ``s2``.
    """

    matrix: csr_matrix
    accepting: np.ndarray
    robot: RobotModel = None
    buchi: BuchiAutomaton = None
    robot_index: np.ndarray = field(default=None, repr=False)
    buchi_index: np.ndarray = field(default=None, repr=False)
    letter_index: np.ndarray = field(default=None, repr=False)
    letters: list = field(default=None, repr=False)

    initial = 0

    def __len__(self):
        return self.matrix.shape[0]

    def state(self, q):
        if self.robot is None:
            return q
        return (self.robot.states[self.robot_index[q]], self.buchi.states[self.buchi_index[q]])

    def label(self, q) -> frozenset:
        if self.letters is None:
            return frozenset()
        return self.letters[self.letter_index[q]]

    def successors(self, q) -> list:
        m = self.matrix
        lo, hi = m.indptr[q], m.indptr[q + 1]
        return list(zip(m.indices[lo:hi].tolist(), m.data[lo:hi].tolist()))

    @classmethod
    def from_edges(cls, size, edges, accepting):
        """Plain graph on nodes ``0..size-1``; ``edges`` are ``(u, v, w)``
        triples (parallel edges keep the cheapest)."""
        best = {}
        for u, v, w in edges:
            if w < best.get((u, v), math.inf):
                best[(u, v)] = w
        rows = np.array([u for u, _ in best], dtype=np.int64)
        cols = np.array([v for _, v in best], dtype=np.int64)
        data = np.array(list(best.values()), dtype=float)
        matrix = csr_matrix((data, (rows, cols)), shape=(size, size))
        acc = np.zeros(size, dtype=bool)
        acc[list(accepting)] = True
        return cls(matrix, acc)


def build_product(a: RobotModel, b: BuchiAutomaton) -> ProductGraph:
    """``G = a x b`` restricted to nodes reachable from ``(a.initial,
    b.initial)``; edge weights are the robot's."""
    ap = b.props
    n_robot, n_buchi = len(a.states), len(b.states)

    letter_ids = {}
    state_letter = np.empty(n_robot, dtype=np.int64)
    for k, s in enumerate(a.states):
        state_letter[k] = letter_ids.setdefault(a.labels[s] & ap, len(letter_ids))
    letters = list(letter_ids)

    names, zsrc, zdst, pos, neg = b.edge_matrices
    src, dst, w = a.edge_arrays
    edge_letter = state_letter[dst]
    rows, cols, data = [], [], []
    for x_id, x in enumerate(letters):
        sel = np.flatnonzero(edge_letter == x_id)
        if not len(sel):
            continue
        held = np.array([p in x for p in names], dtype=bool)
        ok = ~(pos & ~held).any(axis=1) & ~(neg & held).any(axis=1)
        if not ok.any():
            continue
        zs, ts = np.unique(np.stack([zsrc[ok], zdst[ok]]), axis=1)
        rows.append((src[sel, None] * n_buchi + zs[None, :]).ravel())
        cols.append((dst[sel, None] * n_buchi + ts[None, :]).ravel())
        data.append(np.repeat(w[sel], len(zs)))

    size = n_robot * n_buchi
    start = a.state_index[a.initial] * n_buchi + b.states.index(b.initial)
    if rows:
        rows, cols, data = np.concatenate(rows), np.concatenate(cols), np.concatenate(data)
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        data = np.zeros(0)
    full = csr_matrix((data, (rows, cols)), shape=(size, size))
    order = breadth_first_order(full, start, directed=True, return_predecessors=False)

    renumber = np.full(size, -1, dtype=np.int64)
    renumber[order] = np.arange(len(order))
    keep = renumber[rows] >= 0
    matrix = csr_matrix((data[keep], (renumber[rows[keep]], renumber[cols[keep]])),
                        shape=(len(order), len(order)))
    robot_index = order // n_buchi
    buchi_index = order % n_buchi
    acc_mask = np.array([z in b.accepting for z in b.states], dtype=bool)
    return ProductGraph(matrix, acc_mask[buchi_index], a, b, robot_index, buchi_index,
                        state_letter[robot_index], letters)


@dataclass(frozen=True)
class Behavior:
    """An accepting lasso: ``prefix`` runs from the initial product state to
    an accepting state ``q_l``; ``cycle`` starts and ends at ``q_l``.

    ``cost`` sums the prefix edge weights only. The empty behavior (no
    accepting lasso exists) has empty paths and infinite cost.
    """

    prefix: tuple = ()
    cycle: tuple = ()
    cost: float = math.inf
    cycle_cost: float = math.inf
    prefix_labels: tuple = ()
    cycle_labels: tuple = ()
    automaton: BuchiAutomaton = field(default=None, compare=False, repr=False)

    @property
    def is_empty(self) -> bool:
        return not self.prefix

    def state_at(self, t: int):
        """Product state after ``t`` steps along prefix then repeated cycle."""
        ell = len(self.prefix) - 1
        if t <= ell:
            return self.prefix[t]
        period = len(self.cycle) - 1
        return self.cycle[(t - ell) % period]

    def word(self) -> LassoWord:
        """Letters consumed by the automaton: the labels of every state after
        the initial one."""
        return LassoWord(self.prefix_labels[1:], self.cycle_labels[1:])

    def trace(self) -> LassoWord:
        """Labels of every visited state, starting with the initial one."""
        return LassoWord(self.prefix_labels[:-1], self.cycle_labels[:-1])


EMPTY = Behavior()


def _path(pred, target):
    path = [int(target)]
    while pred[path[-1]] >= 0:
        path.append(int(pred[path[-1]]))
    path.reverse()
    return path


def cyclic_nodes(matrix) -> np.ndarray:
    """Boolean mask of nodes lying on some cycle."""
    _, comp = connected_components(matrix, directed=True, connection="strong")
    on_cycle = np.bincount(comp)[comp] > 1
    coo = matrix.tocoo()
    on_cycle[coo.row[coo.row == coo.col]] = True
    return on_cycle


def shortest_accepting_lasso(g: ProductGraph) -> Behavior:
    """Cheapest prefix to an accepting node lying on a cycle, closed by the
    cheapest cycle through that node.

    Ties on prefix cost go to the cheaper cycle, then the smaller node
    number.
    """
    if len(g) == 0:
        return EMPTY
    dist, pred = dijkstra(g.matrix, directed=True, indices=g.initial, return_predecessors=True)
    candidates = np.flatnonzero(g.accepting & cyclic_nodes(g.matrix) & np.isfinite(dist))
    if not len(candidates):
        return EMPTY
    best = dist[candidates].min()
    incoming = g.matrix.tocsc()
    choice = None
    for f in candidates[dist[candidates] == best]:
        limit = np.inf if choice is None else choice[0]
        dist_f, pred_f = dijkstra(g.matrix, directed=True, indices=f,
                                  return_predecessors=True, limit=limit)
        lo, hi = incoming.indptr[f], incoming.indptr[f + 1]
        closing = dist_f[incoming.indices[lo:hi]] + incoming.data[lo:hi]
        k = int(np.argmin(closing))
        if choice is None or closing[k] < choice[0]:
            last = int(incoming.indices[lo + k])
            choice = (float(closing[k]), int(f), _path(pred_f, last) + [int(f)])
    cycle_cost, f, cycle = choice
    prefix = _path(pred, f)
    return Behavior(
        prefix=tuple(g.state(q) for q in prefix),
        cycle=tuple(g.state(q) for q in cycle),
        cost=float(dist[f]),
        cycle_cost=cycle_cost,
        prefix_labels=tuple(g.label(q) for q in prefix),
        cycle_labels=tuple(g.label(q) for q in cycle),
        automaton=g.buchi,
    )


def synthesize_behavior(a: RobotModel, z, b_curr: BuchiAutomaton, phi: Formula):
    """Minimum-cost behavior for ``a`` satisfying ``phi`` together with what
    remains of its current task from automaton state ``z``.

    Returns ``(behavior, cost)``; the cost is infinite when no such
    behavior exists.
    """
    remaining = restrict_reachable(b_curr, z)
    behavior = _synthesize(a, remaining, phi)
    return behavior, behavior.cost


def _synthesize(a, remaining, phi):
    product = build_product(a, intersect(translate(phi), remaining))
    return shortest_accepting_lasso(product)


def compute_sat_cost(a: RobotModel, z, b_curr: BuchiAutomaton, new_tasks):
    """Satisfiability vector and cost table for one robot.

    ``sat[j]`` is 1 when the robot can do sub-task ``j`` alongside its
    remaining current task. ``table`` maps frozensets of 0-based sub-task
    indices to behavior costs: the empty set (current task alone), every
    singleton, and every larger subset of the satisfiable sub-tasks.
    """
    remaining = restrict_reachable(b_curr, z)
    sat = [0] * len(new_tasks)
    table = {frozenset(): _synthesize(a, remaining, ltl.TRUE).cost}
    for j, phi in enumerate(new_tasks):
        cost = _synthesize(a, remaining, phi).cost
        table[frozenset({j})] = cost
        if cost < math.inf:
            sat[j] = 1
    doable = [j for j in range(len(new_tasks)) if sat[j]]
    for size in range(2, len(doable) + 1):
        for combo in itertools.combinations(doable, size):
            phi = ltl.conjoin(new_tasks[j] for j in combo)
            table[frozenset(combo)] = _synthesize(a, remaining, phi).cost
    return sat, table
