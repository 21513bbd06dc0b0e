"""Random generators and brute-force oracles shared by the tests."""
import itertools
import math
import random

import numpy as np

from taskforge import ltl
from taskforge.ltl import LassoWord

PROPS = ("a", "b", "c")
ROOT = __import__("pathlib").Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"

_UNARY = (ltl.Not, ltl.Next, ltl.Eventually, ltl.Always)
_BINARY = (ltl.And, ltl.Or, ltl.Implies, ltl.Iff, ltl.Until, ltl.Release)


def random_formula(rng: random.Random, depth: int = 4, props=PROPS):
    """Uniform-ish random formula of nesting depth at most ``depth``."""
    if depth == 0 or rng.random() < 0.2:
        r = rng.random()
        if r < 0.06:
            return ltl.TRUE
        if r < 0.12:
            return ltl.FALSE
        return ltl.Prop(rng.choice(props))
    if rng.random() < 0.45:
        return rng.choice(_UNARY)(random_formula(rng, depth - 1, props))
    op = rng.choice(_BINARY)
    return op(random_formula(rng, depth - 1, props), random_formula(rng, depth - 1, props))


def random_letter(rng, props=PROPS):
    return frozenset(p for p in props if rng.random() < 0.5)


def random_lasso(rng: random.Random, props=PROPS, max_prefix=4, max_loop=4):
    prefix = [random_letter(rng, props) for _ in range(rng.randint(0, max_prefix))]
    loop = [random_letter(rng, props) for _ in range(rng.randint(1, max_loop))]
    return LassoWord(prefix, loop)


def random_graph(rng: random.Random, max_nodes=60):
    """``(size, edges, accepting)`` with small integer weights, including
    zero weights and self-loops."""
    size = rng.randint(1, max_nodes)
    density = rng.uniform(1.0, 3.0)
    edges = []
    for u in range(size):
        for _ in range(rng.randint(0, int(2 * density))):
            edges.append((u, rng.randrange(size), rng.randint(0, 9)))
    accepting = {q for q in range(size) if rng.random() < 0.15}
    return size, edges, accepting


def min_plus_walks(size, edges):
    """``best[k][u, v]``: cheapest walk from ``u`` to ``v`` with exactly
    ``k`` edges, for ``k = 0..size``; a dense min-plus recurrence over all
    walks, independent of any shortest-path routine."""
    w = np.full((size, size), math.inf)
    for u, v, c in edges:
        w[u, v] = min(w[u, v], c)
    cur = np.full((size, size), math.inf)
    np.fill_diagonal(cur, 0.0)
    best = [cur]
    for _ in range(size):
        cur = np.min(cur[:, :, None] + w[None, :, :], axis=1)
        best.append(cur)
    return best


def brute_force_lasso(size, edges, accepting, start=0):
    """``(prefix cost, cycle cost)`` of the optimal accepting lasso under
    the (prefix, cycle, node) order, or ``None``."""
    walks = min_plus_walks(size, edges)
    stack = np.stack(walks)
    reach = stack[: size].min(axis=0)  # walks of length 0..size-1 cover all simple paths
    loops = stack[1:].min(axis=0)  # nonempty closed walks of length <= size
    options = []
    for f in accepting:
        if math.isfinite(reach[start, f]) and math.isfinite(loops[f, f]):
            options.append((reach[start, f], loops[f, f], f))
    return min(options)[:2] if options else None


def enumerate_assignments(sats, tables, m):
    """Every assignment vector consistent with ``sats`` together with its
    total cost (infinite when some robot's subset is infeasible)."""
    n = len(tables)
    out = []
    for alpha in itertools.product(range(n + 1), repeat=m):
        if any(i and not sats[i - 1][j] for j, i in enumerate(alpha)):
            continue
        cost = 0.0
        for i in range(1, n + 1):
            p = frozenset(j for j, x in enumerate(alpha) if x == i)
            cost += tables[i - 1].get(p, math.inf)
        out.append((list(alpha), cost))
    return out


def random_tables(rng: random.Random, n: int, m: int, p_sat=0.6, p_conflict=0.1):
    """Synthetic satisfiability vectors and cost tables: a base cost plus a
    per-task cost with a random discount for doing tasks together, and
    occasional infeasible combinations."""
    sats, tables = [], []
    for _ in range(n):
        sat = [1 if rng.random() < p_sat else 0 for _ in range(m)]
        base = rng.randint(0, 5)
        unit = [rng.randint(1, 10) for _ in range(m)]
        table = {frozenset(): float(base)}
        for j in range(m):
            table[frozenset({j})] = float(base + unit[j]) if sat[j] else math.inf
        doable = [j for j in range(m) if sat[j]]
        for size in range(2, len(doable) + 1):
            for combo in itertools.combinations(doable, size):
                if rng.random() < p_conflict:
                    table[frozenset(combo)] = math.inf
                    continue
                shared = sum(unit[j] for j in combo) - rng.randint(0, min(unit[j] for j in combo))
                table[frozenset(combo)] = float(base + shared)
        sats.append(sat)
        tables.append(table)
    return sats, tables
