"""Cycle detection for the automaton code."""


def strongly_connected_components(nodes, succ):
    """Tarjan's algorithm, iterative. ``succ`` maps node -> iterable of
    successors; returns a list of components (lists of nodes)."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    components = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                components.append(comp)
    return components


def nodes_on_cycles(nodes, succ):
    """Set of nodes that lie on some cycle (self-loops included)."""
    out = set()
    for comp in strongly_connected_components(nodes, succ):
        if len(comp) > 1:
            out.update(comp)
        else:
            v = comp[0]
            if v in succ[v]:
                out.add(v)
    return out

