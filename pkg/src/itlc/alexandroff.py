"""Finite Alexandroff dynamical systems: model checking and analysis.

A finite poset with the down-set topology (opens are the downward closed
sets) and a monotone self-map is a dynamical system.  This module
evaluates the full language over such systems, searches for
countermodels by exhaustive enumeration, and decides minimality,
recurrence and connectedness directly from their definitions.  It is
deliberately independent of the quasimodel machinery so the two can
check each other.

Element sets are integer bitmasks internally; the public API speaks in
element names.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass

from .config import Caps, DEFAULT_CAPS
from .errors import CapExceeded, SchemaError
from .formula import (And, Atom, Bottom, Eventually, Exists, Forall, Formula,
                      Henceforth, Implies, Next, Or, subformulas)


@dataclass(frozen=True)
class FinitePoset:
    """Finite partial order; down[i] is the bitmask of elements below i."""

    names: tuple[str, ...]
    down: tuple[int, ...]

    def __post_init__(self):
        n = len(self.names)
        if len(set(self.names)) != n:
            raise SchemaError("elements: duplicate names")
        for i in range(n):
            if not self.down[i] >> i & 1:
                raise SchemaError(f"order: not reflexive at {self.names[i]}")
        for i in range(n):
            for j in range(n):
                if self.down[i] >> j & 1:
                    if self.down[j] & ~self.down[i]:
                        raise SchemaError(
                            f"order: not transitive below {self.names[i]}")
                    if i != j and self.down[j] >> i & 1:
                        raise SchemaError(
                            f"order: antisymmetry fails on "
                            f"({self.names[i]}, {self.names[j]})")

    def leq(self, a: int, b: int) -> bool:
        return bool(self.down[b] >> a & 1)

    def __len__(self) -> int:
        return len(self.names)


@dataclass(frozen=True)
class FiniteSystem:
    """A finite poset with a monotone self-map."""

    poset: FinitePoset
    f: tuple[int, ...]

    def __post_init__(self):
        n = len(self.poset)
        if len(self.f) != n or any(not 0 <= y < n for y in self.f):
            raise SchemaError("map: not a total function on the elements")
        for a in range(n):
            for b in range(n):
                if self.poset.leq(a, b) and not self.poset.leq(self.f[a], self.f[b]):
                    raise SchemaError(
                        f"map: not monotone on ({self.names[a]}, {self.names[b]})")

    @property
    def names(self) -> tuple[str, ...]:
        return self.poset.names

    @property
    def down(self) -> tuple[int, ...]:
        return self.poset.down

    def __len__(self) -> int:
        return len(self.poset)

    def full_mask(self) -> int:
        return (1 << len(self.poset)) - 1

    def mask_of(self, members) -> int:
        index = {name: i for i, name in enumerate(self.names)}
        mask = 0
        for name in members:
            if name not in index:
                raise SchemaError(f"unknown element {name!r}")
            mask |= 1 << index[name]
        return mask

    def names_of(self, mask: int) -> frozenset[str]:
        return frozenset(n for i, n in enumerate(self.names) if mask >> i & 1)


def system(names, order_pairs, mapping) -> FiniteSystem:
    """Build a system from named data; closes the order reflexively and
    transitively, then checks the invariants."""
    names = tuple(names)
    index = {n: i for i, n in enumerate(names)}
    n = len(names)
    down = [1 << i for i in range(n)]
    for a, b in order_pairs:
        if a not in index or b not in index:
            raise SchemaError(f"order: unknown element in ({a!r}, {b!r})")
        down[index[b]] |= 1 << index[a]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            merged = down[i]
            for j in range(n):
                if down[i] >> j & 1:
                    merged |= down[j]
            if merged != down[i]:
                down[i] = merged
                changed = True
    f = []
    for name in names:
        if name not in mapping:
            raise SchemaError(f"map: no image for {name!r}")
        target = mapping[name]
        if target not in index:
            raise SchemaError(f"map: unknown image {target!r}")
        f.append(index[target])
    return FiniteSystem(FinitePoset(names, tuple(down)), tuple(f))


# ---------------------------------------------------------------------------
# Topology and semantics

def _interior_mask(X: FiniteSystem, mask: int) -> int:
    out = 0
    for i in range(len(X)):
        if X.down[i] & ~mask == 0:
            out |= 1 << i
    return out


def interior(X: FiniteSystem, members) -> frozenset[str]:
    """Largest open (downward closed) subset: points whose cone fits inside."""
    return X.names_of(_interior_mask(X, X.mask_of(members)))


def closure(X: FiniteSystem, members) -> frozenset[str]:
    """Smallest closed superset: complement of the interior of the complement."""
    full = X.full_mask()
    return X.names_of(full & ~_interior_mask(X, full & ~X.mask_of(members)))


def _preimage(X: FiniteSystem, mask: int) -> int:
    out = 0
    for i, y in enumerate(X.f):
        if mask >> y & 1:
            out |= 1 << i
    return out


def _evaluate_mask(X: FiniteSystem, valuation: dict[str, int], f: Formula,
                   cache: dict[Formula, int]) -> int:
    hit = cache.get(f)
    if hit is not None:
        return hit
    full = X.full_mask()
    if isinstance(f, Bottom):
        out = 0
    elif isinstance(f, Atom):
        if f.name not in valuation:
            raise KeyError(f"no valuation for atom {f.name!r}")
        out = valuation[f.name]
    elif isinstance(f, And):
        out = (_evaluate_mask(X, valuation, f.left, cache)
               & _evaluate_mask(X, valuation, f.right, cache))
    elif isinstance(f, Or):
        out = (_evaluate_mask(X, valuation, f.left, cache)
               | _evaluate_mask(X, valuation, f.right, cache))
    elif isinstance(f, Implies):
        l = _evaluate_mask(X, valuation, f.left, cache)
        r = _evaluate_mask(X, valuation, f.right, cache)
        out = _interior_mask(X, (full & ~l) | r)
    elif isinstance(f, Next):
        out = _preimage(X, _evaluate_mask(X, valuation, f.body, cache))
    elif isinstance(f, Eventually):
        out = _evaluate_mask(X, valuation, f.body, cache)
        while True:
            grown = out | _preimage(X, out)
            if grown == out:
                break
            out = grown
    elif isinstance(f, Henceforth):
        body = _evaluate_mask(X, valuation, f.body, cache)
        out = body
        while True:
            shrunk = body & _preimage(X, out)
            if shrunk == out:
                break
            out = shrunk
    elif isinstance(f, Exists):
        out = full if _evaluate_mask(X, valuation, f.body, cache) else 0
    elif isinstance(f, Forall):
        out = full if _evaluate_mask(X, valuation, f.body, cache) == full else 0
    else:
        raise TypeError(f"unknown formula node {f!r}")
    cache[f] = out
    return out


def _valuation_masks(X: FiniteSystem, valuation) -> dict[str, int]:
    out = {}
    for atom, members in valuation.items():
        mask = members if isinstance(members, int) else X.mask_of(members)
        if _interior_mask(X, mask) != mask:
            raise SchemaError(f"valuation.{atom}: not downward closed")
        out[atom] = mask
    return out


def evaluate(X: FiniteSystem, valuation, f: Formula) -> frozenset[str]:
    """Truth set of a formula; always a downward closed set of elements.

    Implication relativizes to the cone below each point, next is the
    map preimage, eventually and henceforth are the least and greatest
    fixpoints of their unfoldings, and the quantifiers compare against
    the whole space.
    """
    masks = _valuation_masks(X, valuation)
    return X.names_of(_evaluate_mask(X, masks, f, {}))


def open_masks(X: FiniteSystem) -> list[int]:
    """All downward closed subsets, ascending as bitmasks."""
    return [m for m in range(1 << len(X)) if _interior_mask(X, m) == m]


def is_valid_on_system(X: FiniteSystem, f: Formula, caps: Caps = DEFAULT_CAPS) -> bool:
    """Whether the formula holds everywhere under every open valuation."""
    atoms = sorted({g.name for g in subformulas(f) if isinstance(g, Atom)})
    opens = open_masks(X)
    total = len(opens) ** len(atoms) if atoms else 1
    if total > caps.max_valuations:
        raise CapExceeded(f"{total} valuations exceed the cap")
    full = X.full_mask()
    for combo in itertools.product(opens, repeat=len(atoms)):
        valuation = dict(zip(atoms, combo))
        if _evaluate_mask(X, valuation, f, {}) != full:
            return False
    return True


# ---------------------------------------------------------------------------
# System enumeration and countermodel search

def enumerate_posets(n: int) -> list[FinitePoset]:
    """All labelled posets on n elements, canonical order."""
    names = tuple(_element_names(n))
    out = []
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        down = [1 << i for i in range(n)]
        for (i, j), take in zip(pairs, bits):
            if take:
                down[j] |= 1 << i  # i below j
        ok = True
        for i in range(n):
            for j in range(n):
                if down[j] >> i & 1:
                    if down[i] & ~down[j]:
                        ok = False
                        break
                    if i != j and down[i] >> j & 1:
                        ok = False
                        break
            if not ok:
                break
        if ok:
            out.append(FinitePoset(names, tuple(down)))
    return out


def monotone_maps(poset: FinitePoset) -> list[tuple[int, ...]]:
    n = len(poset)
    out = []
    for f in itertools.product(range(n), repeat=n):
        if all(not poset.leq(a, b) or poset.leq(f[a], f[b])
               for a in range(n) for b in range(n) if a != b):
            out.append(f)
    return out


def enumerate_systems(n: int) -> list[FiniteSystem]:
    """All labelled systems on n elements, canonical order."""
    out = []
    for poset in enumerate_posets(n):
        for f in monotone_maps(poset):
            out.append(FiniteSystem(poset, f))
    return out


def _element_names(n: int) -> list[str]:
    return [f"e{i}" for i in range(n)]


@dataclass(frozen=True)
class Countermodel:
    system: FiniteSystem
    valuation: dict[str, frozenset[str]]
    point: str


def find_countermodel(f: Formula, max_points: int,
                      caps: Caps = DEFAULT_CAPS) -> Countermodel | None:
    """Search all systems up to the given size and all open valuations
    for a point falsifying the formula; first hit in canonical order."""
    atoms = sorted({g.name for g in subformulas(f) if isinstance(g, Atom)})
    examined = 0
    for n in range(1, max_points + 1):
        for X in enumerate_systems(n):
            examined += 1
            if examined > caps.max_systems:
                raise CapExceeded(f"countermodel search passed {caps.max_systems} systems")
            opens = open_masks(X)
            full = X.full_mask()
            for combo in itertools.product(opens, repeat=len(atoms)):
                valuation = dict(zip(atoms, combo))
                truth = _evaluate_mask(X, valuation, f, {})
                if truth != full:
                    point = next(X.names[i] for i in range(n) if not truth >> i & 1)
                    named = {a: X.names_of(m) for a, m in valuation.items()}
                    return Countermodel(X, named, point)
    return None


# ---------------------------------------------------------------------------
# Dynamical properties

@dataclass(frozen=True)
class Analysis:
    minimal: bool
    recurrent: bool
    connected: bool

    def as_dict(self) -> dict:
        return {"minimal": self.minimal, "recurrent": self.recurrent,
                "connected": self.connected}


def analyze(X: FiniteSystem) -> Analysis:
    """Minimality, recurrence, and connectedness from their definitions.

    Minimal: the orbit of every point is dense (its up-closure is the
    whole space).  Recurrent: every principal open contains a point that
    returns to it; principal opens suffice since every nonempty open
    contains one.  Connected: no split into two disjoint nonempty opens,
    i.e. the comparability graph is connected.
    """
    n = len(X)
    full = X.full_mask()

    minimal = True
    for x in range(n):
        orbit = 0
        y = x
        while not orbit >> y & 1:
            orbit |= 1 << y
            y = X.f[y]
        up = 0
        for i in range(n):
            if any(orbit >> j & 1 and X.down[i] >> j & 1 for j in range(n)):
                up |= 1 << i
        if up != full:
            minimal = False
            break

    recurrent = True
    for x in range(n):
        cone = X.down[x]
        hit = False
        for y in range(n):
            if not cone >> y & 1:
                continue
            z = X.f[y]
            seen = set()
            while z not in seen:
                if cone >> z & 1:
                    hit = True
                    break
                seen.add(z)
                z = X.f[z]
            if hit:
                break
        if not hit:
            recurrent = False
            break

    seen_mask = 1
    frontier = [0] if n else []
    while frontier:
        nxt = []
        for i in frontier:
            for j in range(n):
                if not seen_mask >> j & 1 and (X.poset.leq(i, j) or X.poset.leq(j, i)):
                    seen_mask |= 1 << j
                    nxt.append(j)
        frontier = nxt
    connected = seen_mask == full

    return Analysis(minimal, recurrent, connected)


# ---------------------------------------------------------------------------
# Random generation

def random_system(n: int, seed: int = 0) -> FiniteSystem:
    """Seeded random system: a random DAG closed into a poset, and a
    monotone map found by rejection with a constant-map fallback."""
    if n < 1:
        raise ValueError("need at least one element")
    rng = random.Random(seed)
    names = tuple(_element_names(n))
    down = [1 << i for i in range(n)]
    for j in range(n):
        for i in range(j):
            if rng.random() < 0.35:
                down[j] |= 1 << i  # i below j; acyclic since i < j
    changed = True
    while changed:
        changed = False
        for i in range(n):
            merged = down[i]
            for j in range(n):
                if down[i] >> j & 1:
                    merged |= down[j]
            if merged != down[i]:
                down[i] = merged
                changed = True
    poset = FinitePoset(names, tuple(down))
    for _ in range(512):
        f = tuple(rng.randrange(n) for _ in range(n))
        if all(not poset.leq(a, b) or poset.leq(f[a], f[b])
               for a in range(n) for b in range(n) if a != b):
            return FiniteSystem(poset, f)
    target = rng.randrange(n)
    return FiniteSystem(poset, tuple(target for _ in range(n)))


# ---------------------------------------------------------------------------
# Fixtures and file format

def minimal_five():
    """The five-point minimal disconnected system used across the tests.

    Two stacked components: w below v, and z below y below x.  The map
    sends v to x, w to z, and x, y, z onto the w/z two-cycle.  The images
    of x and y are forced to w: monotonicity pins f(y) to f(z)'s
    up-set, and density of the orbit of x needs f(x) in {w, z}; w is the
    only choice keeping the map monotone and the system minimal while
    falsifying the next/implication interchange at v.
    """
    X = system(
        ["v", "w", "x", "y", "z"],
        [("w", "v"), ("y", "x"), ("z", "y")],
        {"v": "x", "w": "z", "x": "w", "y": "w", "z": "w"},
    )
    valuation = {"p": frozenset({"y", "z"}), "q": frozenset({"z"})}
    return X, valuation


def system_to_json(X: FiniteSystem, valuation=None) -> dict:
    n = len(X)
    pairs = [[X.names[i], X.names[j]] for j in range(n) for i in range(n)
             if i != j and X.down[j] >> i & 1]
    data = {
        "elements": list(X.names),
        "order": pairs,
        "map": {X.names[i]: X.names[X.f[i]] for i in range(n)},
    }
    if valuation is not None:
        data["valuation"] = {a: sorted(members) for a, members in valuation.items()}
    return data


def system_from_json(data: dict):
    """Parse and validate the system file shape; returns (system, valuation)."""
    if not isinstance(data, dict):
        raise SchemaError("system file must be an object")
    for field in ("elements", "order", "map"):
        if field not in data:
            raise SchemaError(f"missing field {field!r}")
    X = system(data["elements"], [tuple(p) for p in data["order"]], data["map"])
    valuation = None
    if "valuation" in data:
        valuation = {}
        for atom, members in data["valuation"].items():
            mask = X.mask_of(members)
            if _interior_mask(X, mask) != mask:
                raise SchemaError(f"valuation.{atom}: not downward closed")
            valuation[atom] = X.names_of(mask)
    return X, valuation


def load_system(path):
    with open(path, encoding="utf-8") as fh:
        return system_from_json(json.load(fh))


def save_system(X: FiniteSystem, valuation, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(system_to_json(X, valuation), fh, indent=2)
        fh.write("\n")
