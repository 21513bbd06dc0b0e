"""Reading and writing Buchi automata in the HOA v1 text format.

Only what :class:`~taskforge.buchi.BuchiAutomaton` can express is
supported: one initial state, Buchi acceptance ``Inf(0)``, explicit edge
labels. Acceptance marks may sit on ``State:`` lines or on edges; an edge
mark is read as marking its source state, which is how the writer emits
them.
"""
import re
import shlex

from .buchi import BuchiAutomaton, Edge, Guard, TRUE_GUARD


class HOAError(ValueError):
    pass


def _label(guard: Guard, ap_index: dict) -> str:
    if guard.is_true:
        return "t"
    return " & ".join(str(ap_index[p]) if v else f"!{ap_index[p]}"
                      for p, v in guard.literals())


def export_hoa(b: BuchiAutomaton, name: str = None) -> str:
    aps = sorted(b.props)
    ap_index = {p: k for k, p in enumerate(aps)}
    number = {z: k for k, z in enumerate(b.states)}
    lines = ["HOA: v1"]
    if name is not None:
        lines.append(f'name: "{name}"')
    lines += [
        f"States: {len(b.states)}",
        f"Start: {number[b.initial]}",
        "AP: " + " ".join([str(len(aps))] + [f'"{p}"' for p in aps]),
        "acc-name: Buchi",
        "Acceptance: 1 Inf(0)",
        "properties: trans-labels explicit-labels",
        "--BODY--",
    ]
    out = b.out
    for z in b.states:
        acc = z in b.accepting
        lines.append(f"State: {number[z]}" + (" {0}" if acc and not out[z] else ""))
        for e in out[z]:
            lines.append(f"[{_label(e.guard, ap_index)}] {number[e.dst]}" + (" {0}" if acc else ""))
    lines.append("--END--")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------- importing

_LABEL_TOKEN = re.compile(r"\s*(?:(\d+)|([tf!&|()]))")


def _tokens(text):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _LABEL_TOKEN.match(text, pos)
        if not m:
            raise HOAError(f"bad label expression {text!r}")
        out.append(int(m.group(1)) if m.group(1) else m.group(2))
        pos = m.end()
    return out


def _parse_label(text, aps):
    """Label expression -> list of guards whose disjunction it denotes."""
    toks = _tokens(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def disj():
        nonlocal pos
        terms = [conj()]
        while peek() == "|":
            pos += 1
            terms.append(conj())
        return ("or", terms)

    def conj():
        nonlocal pos
        terms = [unary()]
        while peek() == "&":
            pos += 1
            terms.append(unary())
        return ("and", terms)

    def unary():
        nonlocal pos
        tok = peek()
        pos += 1
        if tok == "!":
            return ("not", unary())
        if tok == "(":
            e = disj()
            if peek() != ")":
                raise HOAError(f"unbalanced parentheses in {text!r}")
            pos += 1
            return e
        if tok in ("t", "f"):
            return (tok,)
        if isinstance(tok, int):
            if tok >= len(aps):
                raise HOAError(f"AP index {tok} out of range")
            return ("ap", aps[tok])
        raise HOAError(f"unexpected token {tok!r} in {text!r}")

    expr = disj()
    if pos != len(toks):
        raise HOAError(f"trailing input in label {text!r}")
    return _dnf(expr, False)


def _dnf(expr, negated):
    kind = expr[0]
    if kind == "t":
        return [] if negated else [TRUE_GUARD]
    if kind == "f":
        return [TRUE_GUARD] if negated else []
    if kind == "ap":
        p = frozenset({expr[1]})
        return [Guard(neg=p) if negated else Guard(pos=p)]
    if kind == "not":
        return _dnf(expr[1], not negated)
    parts = [_dnf(e, negated) for e in expr[1]]
    if (kind == "or") != negated:
        cubes = [c for part in parts for c in part]
    else:
        cubes = [TRUE_GUARD]
        for part in parts:
            cubes = [c & d for c in cubes for d in part if not (c & d).is_false]
    return list(dict.fromkeys(cubes))


def parse_hoa(text: str) -> BuchiAutomaton:
    header, sep, rest = text.partition("--BODY--")
    if not sep:
        raise HOAError("missing --BODY--")
    body, sep, _ = rest.partition("--END--")
    if not sep:
        raise HOAError("missing --END--")

    aps = []
    start = None
    n_states = None
    for line in header.splitlines():
        line = line.strip()
        if not line:
            continue
        key, _, value = line.partition(":")
        value = value.strip()
        if key == "HOA" and value != "v1":
            raise HOAError(f"unsupported HOA version {value!r}")
        elif key == "States":
            n_states = int(value)
        elif key == "Start":
            if start is not None or "&" in value:
                raise HOAError("exactly one initial state is supported")
            start = int(value)
        elif key == "AP":
            fields = shlex.split(value)
            aps = fields[1:]
            if int(fields[0]) != len(aps):
                raise HOAError("AP count does not match the listed names")
        elif key == "Acceptance":
            if value.replace(" ", "") not in ("1Inf(0)", "0t"):
                raise HOAError(f"only Buchi acceptance is supported, got {value!r}")
    if start is None:
        raise HOAError("missing Start header")

    states = []
    edges = []
    state_mark = set()
    edge_marks = {}
    current = None
    for raw in body.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("State:"):
            m = re.match(r"State:\s*(\d+)(?:\s+\"[^\"]*\")?\s*(\{[\d\s]*\})?\s*$", line)
            if not m:
                raise HOAError(f"bad state line {line!r}")
            current = int(m.group(1))
            states.append(current)
            if m.group(2) and "0" in m.group(2)[1:-1].split():
                state_mark.add(current)
            continue
        m = re.match(r"\[([^\]]*)\]\s*(\d+)\s*(\{[\d\s]*\})?\s*$", line)
        if not m or current is None:
            raise HOAError(f"bad edge line {line!r}")
        dst = int(m.group(2))
        marked = bool(m.group(3)) and "0" in m.group(3)[1:-1].split()
        edge_marks.setdefault(current, set()).add(marked)
        for guard in _parse_label(m.group(1), aps):
            edges.append(Edge(current, guard, dst))

    if n_states is not None and len(states) != n_states:
        raise HOAError(f"header declares {n_states} states, body has {len(states)}")
    accepting = set(state_mark)
    for z, marks in edge_marks.items():
        if len(marks) > 1:
            raise HOAError(f"state {z} mixes marked and unmarked edges")
        if True in marks:
            accepting.add(z)
    return BuchiAutomaton(frozenset(aps), tuple(states), start,
                          tuple(dict.fromkeys(edges)), frozenset(accepting))
