"""LTL formulas: abstract syntax, parsing, printing, negation normal form
and direct evaluation over ultimately periodic (lasso) words.

Surface syntax, loosest to tightest binding::

    <->    ->    |    &    U R (right assoc)    ! X F G (prefix)

Identifiers are ``[a-zA-Z0-9_]+``; the words ``X F G U R true false`` are
reserved.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class Formula:
    """Base class of all LTL syntax nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class TrueConst(Formula):
    pass


@dataclass(frozen=True)
class FalseConst(Formula):
    pass


@dataclass(frozen=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    arg: Formula


@dataclass(frozen=True)
class Always(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula


TRUE = TrueConst()
FALSE = FalseConst()

UNARY = (Not, Next, Eventually, Always)
BINARY = (And, Or, Implies, Iff, Until, Release)

_UNARY_SYMBOL = {Not: "!", Next: "X", Eventually: "F", Always: "G"}
_BINARY_SYMBOL = {And: "&", Or: "|", Implies: "->", Iff: "<->",
                  Until: "U", Release: "R"}


def conjoin(formulas: Iterable[Formula]) -> Formula:
    """Left-nested And-chain of ``formulas``; ``true`` when empty."""
    result = None
    for f in formulas:
        result = f if result is None else And(result, f)
    return TRUE if result is None else result


def atomic_props(f: Formula) -> frozenset:
    """Names of all propositions occurring in ``f``."""
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Prop):
            out.add(g.name)
        elif isinstance(g, UNARY):
            stack.append(g.arg)
        elif isinstance(g, BINARY):
            stack.append(g.left)
            stack.append(g.right)
    return frozenset(out)


def subformulas(f: Formula) -> list:
    """All distinct subformulas of ``f`` in post-order (children first)."""
    seen = {}

    def visit(g):
        if g in seen:
            return
        if isinstance(g, UNARY):
            visit(g.arg)
        elif isinstance(g, BINARY):
            visit(g.left)
            visit(g.right)
        seen[g] = None

    visit(f)
    return list(seen)


# ---------------------------------------------------------------- printing

def _wrap(f: Formula) -> str:
    text = to_text(f)
    return f"({text})" if isinstance(f, BINARY) else text


def to_text(f: Formula) -> str:
    """Render ``f`` in the surface syntax accepted by :func:`parse_ltl`.

    Binary operands that are themselves binary are parenthesised, so the
    output never depends on precedence or associativity.
    """
    if isinstance(f, TrueConst):
        return "true"
    if isinstance(f, FalseConst):
        return "false"
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, UNARY):
        return f"{_UNARY_SYMBOL[type(f)]}{' ' if not isinstance(f, Not) else ''}{_wrap(f.arg)}"
    if isinstance(f, BINARY):
        return f"{_wrap(f.left)} {_BINARY_SYMBOL[type(f)]} {_wrap(f.right)}"
    raise TypeError(f"not a formula: {f!r}")


# ----------------------------------------------------------------- parsing

class LTLSyntaxError(ValueError):
    """Malformed LTL text. ``offset`` is a byte offset into the UTF-8 input."""

    def __init__(self, text: str, index: int, expected: str, found: str):
        self.offset = len(text[:index].encode("utf-8"))
        self.expected = expected
        self.found = found
        super().__init__(f"syntax error at byte {self.offset}: expected {expected}, found {found}")


_KEYWORDS = {"X", "F", "G", "U", "R", "true", "false"}
_SYMBOLS = ("<->", "->", "!", "&", "|", "(", ")")


def _is_ident_char(c: str) -> bool:
    return c.isascii() and (c.isalnum() or c == "_")


def _tokenize(text: str) -> list:
    tokens = []  # (kind, value, index)
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if _is_ident_char(c):
            j = i
            while j < len(text) and _is_ident_char(text[j]):
                j += 1
            word = text[i:j]
            tokens.append(("kw" if word in _KEYWORDS else "ident", word, i))
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(("sym", sym, i))
                i += len(sym)
                break
        else:
            raise LTLSyntaxError(text, i, "an operator, identifier or '('", repr(c))
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def at(self, value: str) -> bool:
        kind, tok, _ = self.peek()
        return kind in ("sym", "kw") and tok == value

    def fail(self, expected: str):
        kind, tok, index = self.peek()
        found = "end of input" if kind == "eof" else repr(tok)
        raise LTLSyntaxError(self.text, index, expected, found)

    def parse(self) -> Formula:
        f = self.iff()
        if self.peek()[0] != "eof":
            self.fail("an operator or end of input")
        return f

    def iff(self):
        f = self.implies()
        while self.at("<->"):
            self.pos += 1
            f = Iff(f, self.implies())
        return f

    def implies(self):
        f = self.disjunction()
        if self.at("->"):
            self.pos += 1
            return Implies(f, self.implies())
        return f

    def disjunction(self):
        f = self.conjunction()
        while self.at("|"):
            self.pos += 1
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.binary_temporal()
        while self.at("&"):
            self.pos += 1
            f = And(f, self.binary_temporal())
        return f

    def binary_temporal(self):
        f = self.unary()
        if self.at("U"):
            self.pos += 1
            return Until(f, self.binary_temporal())
        if self.at("R"):
            self.pos += 1
            return Release(f, self.binary_temporal())
        return f

    def unary(self):
        for sym, cls in (("!", Not), ("X", Next), ("F", Eventually), ("G", Always)):
            if self.at(sym):
                self.pos += 1
                return cls(self.unary())
        return self.atom()

    def atom(self):
        kind, tok, _ = self.peek()
        if kind == "ident":
            self.pos += 1
            return Prop(tok)
        if self.at("true"):
            self.pos += 1
            return TRUE
        if self.at("false"):
            self.pos += 1
            return FALSE
        if self.at("("):
            self.pos += 1
            f = self.iff()
            if not self.at(")"):
                self.fail("')'")
            self.pos += 1
            return f
        self.fail("a proposition, 'true', 'false', '(' or a unary operator")


def parse_ltl(text: str) -> Formula:
    """Parse LTL surface syntax into a :class:`Formula`.

    >>> parse_ltl("F (room_3 & pull_lever)")
    Eventually(arg=And(left=Prop(name='room_3'), right=Prop(name='pull_lever')))
    """
    return _Parser(text).parse()


# ----------------------------------------------------- negation normal form

def to_nnf(f: Formula) -> Formula:
    """Equivalent formula over true/false, literals, And, Or, Next, Until and
    Release only, with negation applied to propositions alone."""
    return _nnf(f, False)


def _nnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, TrueConst):
        return FALSE if neg else TRUE
    if isinstance(f, FalseConst):
        return TRUE if neg else FALSE
    if isinstance(f, Prop):
        return Not(f) if neg else f
    if isinstance(f, Not):
        return _nnf(f.arg, not neg)
    if isinstance(f, Next):
        return Next(_nnf(f.arg, neg))
    if isinstance(f, And):
        cls = Or if neg else And
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Or):
        cls = And if neg else Or
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Implies):
        return _nnf(Or(Not(f.left), f.right), neg)
    if isinstance(f, Iff):
        return _nnf(Or(And(f.left, f.right), And(Not(f.left), Not(f.right))), neg)
    if isinstance(f, Until):
        cls = Release if neg else Until
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Release):
        cls = Until if neg else Release
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Eventually):
        return _nnf(Until(TRUE, f.arg), neg)
    if isinstance(f, Always):
        return _nnf(Release(FALSE, f.arg), neg)
    raise TypeError(f"not a formula: {f!r}")


def is_nnf(f: Formula) -> bool:
    for g in subformulas(f):
        if isinstance(g, (Implies, Iff, Eventually, Always)):
            return False
        if isinstance(g, Not) and not isinstance(g.arg, Prop):
            return False
    return True


# ------------------------------------------------------------ lasso words

def letter(*props: str) -> frozenset:
    return frozenset(props)


@dataclass(frozen=True)
class LassoWord:
    """The infinite word ``prefix . loop^omega``; letters are sets of the
    propositions that hold, everything else is false."""

    prefix: tuple
    loop: tuple

    def __init__(self, prefix: Sequence[Iterable[str]], loop: Sequence[Iterable[str]]):
        loop = tuple(frozenset(x) for x in loop)
        if not loop:
            raise ValueError("lasso loop must be nonempty")
        object.__setattr__(self, "prefix", tuple(frozenset(x) for x in prefix))
        object.__setattr__(self, "loop", loop)

    def __len__(self) -> int:
        return len(self.prefix) + len(self.loop)

    def letters(self) -> tuple:
        return self.prefix + self.loop

    def successor(self, pos: int) -> int:
        """Next position in the finite quotient, wrapping to the loop start."""
        return pos + 1 if pos + 1 < len(self) else len(self.prefix)

    def __getitem__(self, index: int) -> frozenset:
        """Letter at an arbitrary position of the infinite word."""
        if index < len(self.prefix):
            return self.prefix[index]
        return self.loop[(index - len(self.prefix)) % len(self.loop)]

    def restrict(self, props: Iterable[str]) -> "LassoWord":
        keep = frozenset(props)
        return LassoWord([x & keep for x in self.prefix], [x & keep for x in self.loop])

    def shift(self, k: int = 1) -> "LassoWord":
        """The suffix of the word starting at position ``k``."""
        n = len(self.prefix)
        if k <= n:
            return LassoWord(self.prefix[k:], self.loop)
        r = (k - n) % len(self.loop)
        return LassoWord((), self.loop[r:] + self.loop[:r])


def eval_lasso(f: Formula, w: LassoWord) -> bool:
    """Whether ``w`` satisfies ``f``.

    Every subformula is evaluated at each of the ``|prefix| + |loop|``
    distinct positions; Until is the least and Release the greatest
    fixpoint of its one-step unfolding along the loop-back successor.
    """
    return _eval_positions(f, w)[f][0]


def _eval_positions(f: Formula, w: LassoWord) -> dict:
    letters = w.letters()
    n = len(letters)
    succ = [w.successor(p) for p in range(n)]
    val = {}
    for g in subformulas(f):
        if isinstance(g, TrueConst):
            v = [True] * n
        elif isinstance(g, FalseConst):
            v = [False] * n
        elif isinstance(g, Prop):
            v = [g.name in x for x in letters]
        elif isinstance(g, Not):
            v = [not a for a in val[g.arg]]
        elif isinstance(g, Next):
            a = val[g.arg]
            v = [a[succ[p]] for p in range(n)]
        elif isinstance(g, Eventually):
            v = _until([True] * n, val[g.arg], succ)
        elif isinstance(g, Always):
            v = _release([False] * n, val[g.arg], succ)
        else:
            a, b = val[g.left], val[g.right]
            if isinstance(g, And):
                v = [x and y for x, y in zip(a, b)]
            elif isinstance(g, Or):
                v = [x or y for x, y in zip(a, b)]
            elif isinstance(g, Implies):
                v = [(not x) or y for x, y in zip(a, b)]
            elif isinstance(g, Iff):
                v = [x == y for x, y in zip(a, b)]
            elif isinstance(g, Until):
                v = _until(a, b, succ)
            elif isinstance(g, Release):
                v = _release(a, b, succ)
            else:
                raise TypeError(f"not a formula: {g!r}")
        val[g] = v
    return val


def _until(a, b, succ):
    v = list(b)
    changed = True
    while changed:
        changed = False
        for p in range(len(v) - 1, -1, -1):
            if not v[p] and a[p] and v[succ[p]]:
                v[p] = True
                changed = True
    return v


def _release(a, b, succ):
    v = list(b)
    changed = True
    while changed:
        changed = False
        for p in range(len(v) - 1, -1, -1):
            if v[p] and not a[p] and not v[succ[p]]:
                v[p] = False
                changed = True
    return v
