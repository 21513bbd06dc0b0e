"""Nondeterministic Buchi automata with guard-labelled edges.

Translation from LTL goes through a tableau expansion into a transition
based generalized Buchi automaton (one acceptance set per Until
subformula), which is then degeneralized with a round-robin counter into an
ordinary state-based automaton.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Hashable, Iterable, NamedTuple

import numpy as np

from . import ltl
from ._graph import nodes_on_cycles
from .ltl import Formula, LassoWord


@dataclass(frozen=True)
class Guard:
    """Conjunction of literals: every name in ``pos`` holds and no name in
    ``neg`` holds. The empty conjunction is ``true``."""

    pos: frozenset = frozenset()
    neg: frozenset = frozenset()

    def sat_by(self, letter: frozenset) -> bool:
        return self.pos <= letter and self.neg.isdisjoint(letter)

    def __and__(self, other: "Guard") -> "Guard":
        return Guard(self.pos | other.pos, self.neg | other.neg)

    @property
    def is_false(self) -> bool:
        return not self.pos.isdisjoint(self.neg)

    @property
    def is_true(self) -> bool:
        return not self.pos and not self.neg

    @property
    def props(self) -> frozenset:
        return self.pos | self.neg

    def literals(self) -> list:
        """``(name, polarity)`` pairs sorted by name."""
        return sorted([(p, True) for p in self.pos] + [(p, False) for p in self.neg])

    def __str__(self) -> str:
        if self.is_true:
            return "true"
        return " & ".join(p if v else "!" + p for p, v in self.literals())

    def sort_key(self):
        return tuple(self.literals())


TRUE_GUARD = Guard()
# unsatisfiable sentinel; never stored on an automaton edge
FALSE_GUARD = Guard(frozenset({"⊥"}), frozenset({"⊥"}))


class Edge(NamedTuple):
    src: Hashable
    guard: Guard
    dst: Hashable


@dataclass(frozen=True)
class IntersectionState:
    left: Hashable
    right: Hashable
    counter: int


class UnknownStateError(KeyError):
    pass


@dataclass(frozen=True)
class BuchiAutomaton:
    """``B = (2^props, states, initial, edges, accepting)``.

    ``info`` optionally maps a state to a description of where it came from
    (the obligation set of a tableau state, an :class:`IntersectionState`);
    it does not take part in equality.
    """

    props: frozenset
    states: tuple
    initial: Hashable
    edges: tuple
    accepting: frozenset
    info: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        states = set(self.states)
        if len(states) != len(self.states):
            raise ValueError("duplicate state ids")
        if self.initial not in states:
            raise ValueError(f"initial state {self.initial!r} is not a state")
        if not self.accepting <= states:
            raise ValueError("accepting states must be states")
        for e in self.edges:
            if e.src not in states or e.dst not in states:
                raise ValueError(f"edge {e} has an unknown endpoint")
            if not e.guard.props <= self.props:
                raise ValueError(f"guard {e.guard} uses propositions outside the alphabet")

    @cached_property
    def out(self) -> dict:
        """state -> tuple of outgoing edges."""
        table = {z: [] for z in self.states}
        for e in self.edges:
            table[e.src].append(e)
        return {z: tuple(es) for z, es in table.items()}

    def successors(self, z, letter: frozenset) -> list:
        return [e.dst for e in self.out[z] if e.guard.sat_by(letter)]

    @cached_property
    def edge_matrices(self):
        """Edges as arrays: ``(src, dst)`` state positions, and boolean
        ``pos`` / ``neg`` literal matrices over ``sorted(props)``."""
        names = sorted(self.props)
        col = {p: k for k, p in enumerate(names)}
        where = {z: k for k, z in enumerate(self.states)}
        src = np.array([where[e.src] for e in self.edges], dtype=np.int64)
        dst = np.array([where[e.dst] for e in self.edges], dtype=np.int64)
        pos = np.zeros((len(self.edges), len(names)), dtype=bool)
        neg = np.zeros_like(pos)
        for k, e in enumerate(self.edges):
            pos[k, [col[p] for p in e.guard.pos]] = True
            neg[k, [col[p] for p in e.guard.neg]] = True
        return names, src, dst, pos, neg

    def __str__(self) -> str:
        lines = [f"states={len(self.states)} initial={self.initial} "
                 f"accepting={sorted(self.accepting, key=repr)}"]
        for e in self.edges:
            lines.append(f"  {e.src} --[{e.guard}]--> {e.dst}")
        return "\n".join(lines)


# ------------------------------------------------------------- translation

def translate(f: Formula) -> BuchiAutomaton:
    """Buchi automaton accepting exactly the words that satisfy ``f``."""
    return _translate_nnf(ltl.to_nnf(f), ltl.atomic_props(f))


@lru_cache(maxsize=4096)
def _translate_nnf(f: Formula, props: frozenset) -> BuchiAutomaton:
    closure = ltl.subformulas(f)
    index = {g: i for i, g in enumerate(closure)}
    untils = [i for i, g in enumerate(closure) if isinstance(g, ltl.Until)]
    true_id = index.get(ltl.TRUE)

    def normalize(obligations):
        return obligations - {true_id} if true_id is not None else obligations

    def negation(i):
        g = closure[i]
        other = g.arg if isinstance(g, ltl.Not) else ltl.Not(g)
        return index.get(other)

    def expand(todo):
        covers = []
        stack = [(todo, frozenset(), frozenset())]
        while stack:
            todo, old, nxt = stack.pop()
            if not todo:
                covers.append((old, nxt))
                continue
            i = max(todo)
            todo = todo - {i}
            if i in old:
                stack.append((todo, old, nxt))
                continue
            g = closure[i]
            old_i = old | {i}
            if isinstance(g, ltl.TrueConst):
                # recorded so that "x U true" counts as fulfilled
                stack.append((todo, old_i, nxt))
            elif isinstance(g, ltl.FalseConst):
                continue
            elif isinstance(g, (ltl.Prop, ltl.Not)):
                if negation(i) in old:
                    continue
                stack.append((todo, old_i, nxt))
            elif isinstance(g, ltl.And):
                stack.append((todo | {index[g.left], index[g.right]}, old_i, nxt))
            elif isinstance(g, ltl.Or):
                stack.append((todo | {index[g.right]}, old_i, nxt))
                stack.append((todo | {index[g.left]}, old_i, nxt))
            elif isinstance(g, ltl.Next):
                stack.append((todo, old_i, nxt | {index[g.arg]}))
            elif isinstance(g, ltl.Until):
                stack.append((todo | {index[g.left]}, old_i, nxt | {i}))
                stack.append((todo | {index[g.right]}, old_i, nxt))
            elif isinstance(g, ltl.Release):
                stack.append((todo | {index[g.right]}, old_i, nxt | {i}))
                stack.append((todo | {index[g.left], index[g.right]}, old_i, nxt))
            else:
                raise TypeError(f"formula not in negation normal form: {g}")
        return covers

    def guard_of(old):
        pos, neg = set(), set()
        for i in old:
            g = closure[i]
            if isinstance(g, ltl.Prop):
                pos.add(g.name)
            elif isinstance(g, ltl.Not):
                neg.add(g.arg.name)
        return Guard(frozenset(pos), frozenset(neg))

    def marks_of(old):
        return frozenset(k for k, u in enumerate(untils)
                         if u not in old or index[closure[u].right] in old)

    # generalized automaton: states are obligation sets
    start = normalize(frozenset({index[f]}))
    gba = {}
    queue = deque([start])
    seen = {start}
    while queue:
        q = queue.popleft()
        edges = set()
        for old, nxt in expand(q):
            target = normalize(nxt)
            edges.add((guard_of(old), target, marks_of(old)))
        gba[q] = sorted(edges, key=lambda e: (e[0].sort_key(), sorted(e[1]), sorted(e[2])))
        for _, target, _ in gba[q]:
            if target not in seen:
                seen.add(target)
                queue.append(target)

    # degeneralization: level k means every acceptance set was just seen
    k = len(untils)

    def level_after(level, marks):
        j = 0 if level == k else level
        while j < k and j in marks:
            j += 1
        return j

    ids = {(start, 0): 0}
    info = {0: (frozenset(closure[i] for i in start), 0)}
    edges = []
    queue = deque([(start, 0)])
    while queue:
        node = queue.popleft()
        q, level = node
        for guard, target, marks in gba[q]:
            succ = (target, level_after(level, marks))
            if succ not in ids:
                ids[succ] = len(ids)
                info[ids[succ]] = (frozenset(closure[i] for i in target), succ[1])
                queue.append(succ)
            edges.append(Edge(ids[node], guard, ids[succ]))
    accepting = frozenset(i for (q, level), i in ids.items() if level == k)
    return BuchiAutomaton(props, tuple(range(len(ids))), 0, tuple(dict.fromkeys(edges)),
                          accepting, info)


# -------------------------------------------------------------- acceptance

def accepts_lasso(b: BuchiAutomaton, w: LassoWord) -> bool:
    """Whether some run of ``b`` over ``w`` visits ``b.accepting`` infinitely
    often.

    Searches the finite graph of (state, word position) pairs for a
    reachable cycle through an accepting state.
    """
    letters = w.letters()
    n = len(letters)
    out = b.out
    cache = {}
    start = (b.initial, 0)
    succ = {}
    stack = [start]
    while stack:
        node = stack.pop()
        z, p = node
        key = (z, letters[p])
        targets = cache.get(key)
        if targets is None:
            targets = cache[key] = tuple(dict.fromkeys(
                e.dst for e in out[z] if e.guard.sat_by(letters[p])))
        p2 = p + 1 if p + 1 < n else len(w.prefix)
        nxt = [(t, p2) for t in targets]
        succ[node] = nxt
        for v in nxt:
            if v not in succ:
                succ[v] = None
                stack.append(v)
    accepting = [v for v in succ if v[0] in b.accepting]
    if not accepting:
        return False
    cyclic = nodes_on_cycles(list(succ), succ)
    return any(v in cyclic for v in accepting)


# ------------------------------------------------------------ intersection

def _counter_after(counter, left, right, b1, b2):
    if counter == 0:
        return 1 if left in b1.accepting else 0
    if counter == 1:
        return 2 if right in b2.accepting else 1
    return 0


def intersect(b1: BuchiAutomaton, b2: BuchiAutomaton) -> BuchiAutomaton:
    """Product automaton accepting words whose projections onto each
    alphabet are accepted by the respective operand.

    Guards are conjoined, so each operand only constrains its own
    propositions. The counter component goes 0 -> 1 on entering an
    accepting state of ``b1``, 1 -> 2 on entering one of ``b2`` and resets
    from 2; states with counter 2 are accepting.
    """
    start = IntersectionState(b1.initial, b2.initial, 0)
    ids = {start: 0}
    queue = deque([start])
    edges = []
    out1, out2 = b1.out, b2.out
    while queue:
        s = queue.popleft()
        src = ids[s]
        seen_edges = set()
        for e1 in out1[s.left]:
            for e2 in out2[s.right]:
                guard = e1.guard & e2.guard
                if guard.is_false:
                    continue
                t = IntersectionState(e1.dst, e2.dst,
                                      _counter_after(s.counter, e1.dst, e2.dst, b1, b2))
                if t not in ids:
                    ids[t] = len(ids)
                    queue.append(t)
                edge = Edge(src, guard, ids[t])
                if edge not in seen_edges:
                    seen_edges.add(edge)
                    edges.append(edge)
    accepting = frozenset(i for s, i in ids.items() if s.counter == 2)
    info = {i: s for s, i in ids.items()}
    return BuchiAutomaton(b1.props | b2.props, tuple(range(len(ids))), 0, tuple(edges),
                          accepting, info)


def restrict_reachable(b: BuchiAutomaton, z) -> BuchiAutomaton:
    """Sub-automaton of the states reachable from ``z``, started at ``z``."""
    if z not in b.out:
        raise UnknownStateError(f"unknown state {z!r}")
    order = [z]
    seen = {z}
    i = 0
    while i < len(order):
        for e in b.out[order[i]]:
            if e.dst not in seen:
                seen.add(e.dst)
                order.append(e.dst)
        i += 1
    edges = tuple(e for e in b.edges if e.src in seen)
    info = {s: b.info[s] for s in order if s in b.info}
    return BuchiAutomaton(b.props, tuple(order), z, edges, b.accepting & seen, info)


def universal() -> BuchiAutomaton:
    return translate(ltl.TRUE)


def is_empty(b: BuchiAutomaton) -> bool:
    """True iff no accepting state is both reachable and on a cycle."""
    succ = {z: [e.dst for e in b.out[z]] for z in b.states}
    reach = restrict_reachable(b, b.initial).states
    cyclic = nodes_on_cycles(reach, succ)
    return not any(z in b.accepting for z in cyclic)


def letters_over(props: Iterable[str]) -> list:
    """All 2^|props| letters over ``props`` in a fixed order."""
    names = sorted(props)
    return [frozenset(p for k, p in enumerate(names) if mask >> k & 1)
            for mask in range(1 << len(names))]
