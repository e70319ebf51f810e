"""Syntax of the intuitionistic temporal language.

Formulas are immutable trees built from bottom, atoms, the connectives
and/or/implies, and the modalities next, eventually, henceforth, forall,
exists.  Negation `~a` abbreviates `a -> #` and `a <-> b` abbreviates
`(a -> b) & (b -> a)`; both are handled by the parser, and `~` also by
the printer.

Concrete grammar::

    formula := impl
    impl    := or ('->' impl)? | or '<->' or
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := ('~'|'X'|'<>'|'[]'|'A'|'E') unary | atom | '#' | '(' formula ')'
    atom    := [a-z][a-zA-Z0-9_]*

Precedence: unary > '&' > '|' > '->' (right associative).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .errors import ParseError


@dataclass(frozen=True, slots=True)
class Formula:
    """Base class of all formula nodes."""

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True, slots=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Next(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class Eventually(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class Henceforth(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class Forall(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class Exists(Formula):
    body: Formula


BOT = Bottom()


def neg(f: Formula) -> Formula:
    return Implies(f, BOT)


class Modality(Enum):
    NEXT = "X"
    EVENTUALLY = "<>"
    HENCEFORTH = "[]"
    FORALL = "A"
    EXISTS = "E"


#: Modalities admitted by the decision procedure (after exists-elimination).
DIAMOND_FRAGMENT = frozenset({Modality.NEXT, Modality.EVENTUALLY, Modality.FORALL})

_UNARY = {Next: Modality.NEXT, Eventually: Modality.EVENTUALLY,
          Henceforth: Modality.HENCEFORTH, Forall: Modality.FORALL,
          Exists: Modality.EXISTS}


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (And, Or, Implies)):
        return (f.left, f.right)
    if isinstance(f, (Next, Eventually, Henceforth, Forall, Exists)):
        return (f.body,)
    return ()


# ---------------------------------------------------------------------------
# Parsing

_UNARY_TOKENS = {"~", "X", "<>", "[]", "A", "E"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    """Yield (kind, value, position) triples; kind is 'op' or 'atom'."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "<":
            if text.startswith("<->", i):
                tokens.append(("op", "<->", i))
                i += 3
            elif text.startswith("<>", i):
                tokens.append(("op", "<>", i))
                i += 2
            else:
                raise ParseError("unknown token '<'", i)
        elif text.startswith("->", i):
            tokens.append(("op", "->", i))
            i += 2
        elif text.startswith("[]", i):
            tokens.append(("op", "[]", i))
            i += 2
        elif c in "~&|()#XAE":
            tokens.append(("op", c, i))
            i += 1
        elif c.islower():
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("atom", text[i:j], i))
            i = j
        else:
            raise ParseError(f"unknown token {c!r}", i)
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.text = text

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.pos += 1
        return tok

    def expect(self, value: str) -> None:
        tok = self.take()
        if tok[0] != "op" or tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1]!r}", tok[2])

    def impl(self) -> Formula:
        left = self.disj()
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] == "->":
            self.take()
            return Implies(left, self.impl())
        if tok and tok[0] == "op" and tok[1] == "<->":
            self.take()
            right = self.disj()
            return And(Implies(left, right), Implies(right, left))
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while (tok := self.peek()) and tok[0] == "op" and tok[1] == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while (tok := self.peek()) and tok[0] == "op" and tok[1] == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.take()
        kind, value, pos = tok
        if kind == "atom":
            return Atom(value)
        if value == "#":
            return BOT
        if value == "(":
            f = self.impl()
            self.expect(")")
            return f
        if value in _UNARY_TOKENS:
            body = self.unary()
            return {"~": lambda b: Implies(b, BOT), "X": Next, "<>": Eventually,
                    "[]": Henceforth, "A": Forall, "E": Exists}[value](body)
        raise ParseError(f"unexpected token {value!r}", pos)


def parse(text: str) -> Formula:
    """Parse formula text into its unique AST."""
    parser = _Parser(text)
    f = parser.impl()
    tok = parser.peek()
    if tok is not None:
        raise ParseError(f"trailing input {tok[1]!r}", tok[2])
    return f


# ---------------------------------------------------------------------------
# Printing

_IMPL, _OR, _AND, _UNARY_LVL, _ATOM = 0, 1, 2, 3, 4


def _render(f: Formula, min_level: int) -> str:
    if isinstance(f, Bottom):
        return "#"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Implies) and f.right == BOT:
        text, level = "~" + _render(f.left, _UNARY_LVL), _UNARY_LVL
    elif type(f) in _UNARY:
        text, level = _UNARY[type(f)].value + _render(children(f)[0], _UNARY_LVL), _UNARY_LVL
    elif isinstance(f, And):
        text, level = _render(f.left, _AND) + " & " + _render(f.right, _AND + 1), _AND
    elif isinstance(f, Or):
        text, level = _render(f.left, _OR) + " | " + _render(f.right, _OR + 1), _OR
    else:  # Implies, right associative
        text, level = _render(f.left, _IMPL + 1) + " -> " + _render(f.right, _IMPL), _IMPL
    return f"({text})" if level < min_level else text


def format_formula(f: Formula) -> str:
    """Render with minimal parentheses; parse(format_formula(f)) == f."""
    return _render(f, _IMPL)


# ---------------------------------------------------------------------------
# Structural operations

def subformulas(f: Formula) -> tuple[Formula, ...]:
    """All subformulas in post-order of first occurrence, deduplicated."""
    acc: list[Formula] = []
    seen: set[Formula] = set()

    def walk(g: Formula) -> None:
        if g in seen:
            return
        for child in children(g):
            walk(child)
        if g not in seen:
            seen.add(g)
            acc.append(g)

    walk(f)
    return tuple(acc)


def eliminate_exists(f: Formula) -> Formula:
    """Rewrite every exists subterm, innermost first, to ~A~body.

    The result evaluates to the same truth set on every model.
    """
    if isinstance(f, Exists):
        return neg(Forall(neg(eliminate_exists(f.body))))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(eliminate_exists(f.left), eliminate_exists(f.right))
    if isinstance(f, (Next, Eventually, Henceforth, Forall)):
        return type(f)(eliminate_exists(f.body))
    return f


def fragment_of(f: Formula) -> frozenset[Modality]:
    """The exact set of modalities occurring in the formula."""
    mods: set[Modality] = set()

    def walk(g: Formula) -> None:
        if type(g) in _UNARY:
            mods.add(_UNARY[type(g)])
        for child in children(g):
            walk(child)

    walk(f)
    return frozenset(mods)


def in_diamond_fragment(f: Formula) -> bool:
    return fragment_of(f) <= DIAMOND_FRAGMENT


# ---------------------------------------------------------------------------
# Translation into the classical bimodal language

def godel_tarski(f: Formula) -> str:
    """Print the interior-modality translation of a formula.

    Clauses: atoms gain a leading interior modality, implication becomes
    an interior-guarded classical arrow, henceforth gains an interior
    guard, everything else maps homomorphically.  Rendered tokens:
    '*' interior, '->' classical arrow, 'X'/'<>'/'[]'/'A'/'E'/'#' as in
    the source syntax.
    """
    text, _ = _gt(f)
    return text


def _gt(f: Formula) -> tuple[str, int]:
    # levels: 0 = arrow, 1 = unary/atomic
    if isinstance(f, Bottom):
        return "#", 1
    if isinstance(f, Atom):
        return "*" + f.name, 1
    if isinstance(f, Implies):
        return f"*({_gt_at(f.left, 1)} -> {_gt_at(f.right, 0)})", 1
    if isinstance(f, And):
        return f"({_gt_at(f.left, 1)} & {_gt_at(f.right, 1)})", 1
    if isinstance(f, Or):
        return f"({_gt_at(f.left, 1)} | {_gt_at(f.right, 1)})", 1
    if isinstance(f, Henceforth):
        return "*[]" + _gt_at(f.body, 1), 1
    op = {Next: "X", Eventually: "<>", Forall: "A", Exists: "E"}[type(f)]
    return op + _gt_at(f.body, 1), 1


def _gt_at(f: Formula, min_level: int) -> str:
    text, level = _gt(f)
    return f"({text})" if level < min_level else text


# ---------------------------------------------------------------------------
# Random generation (test and demo plumbing)

def random_formula(rng: random.Random, depth: int, atoms: tuple[str, ...] = ("p", "q"),
                   modalities: frozenset[Modality] = frozenset(Modality)) -> Formula:
    """Seeded random formula of the given maximum depth."""
    leaves = [Atom(a) for a in atoms] + [BOT]
    if depth <= 0:
        return rng.choice(leaves)
    ops: list[object] = [And, Or, Implies]
    unary = {Modality.NEXT: Next, Modality.EVENTUALLY: Eventually,
             Modality.HENCEFORTH: Henceforth, Modality.FORALL: Forall,
             Modality.EXISTS: Exists}
    ops.extend(unary[m] for m in sorted(modalities, key=lambda m: m.value))
    ops.append(None)  # stop early
    op = rng.choice(ops)
    if op is None:
        return rng.choice(leaves)
    if op in (And, Or, Implies):
        return op(random_formula(rng, depth - 1, atoms, modalities),
                  random_formula(rng, depth - 1, atoms, modalities))
    return op(random_formula(rng, depth - 1, atoms, modalities))
