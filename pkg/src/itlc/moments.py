"""Finite labelled trees of types, their reductions, and the successor relation.

A moment is a finite rooted tree whose nodes carry types, with two
structural obligations: labels only grow along branches away from the
root (continuity), and every defect of a node's label is revoked by some
strict descendant carrying the antecedent without the consequent.
Moments are kept in canonical form (children sorted by a content key)
and interned per context, so isomorphic moments are the same object.

The successor relation between moments holds when some node-level
relation pairs the roots, relates only sensible label pairs, and is
forward confluent over the tree orders; it is computed as a greatest
fixpoint over node pairs.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from .config import Caps, DEFAULT_CAPS
from .errors import KitError, SigmaMismatchError
from .labels import SigmaContext, TypeSet


class Moment:
    """Interned canonical labelled tree.  Use moment()/graft() to build."""

    __slots__ = ("sigma", "label", "children", "height", "size", "_key", "_hash",
                 "_subtrees", "_nodes")

    def __init__(self, sigma: SigmaContext, label: int, children: tuple["Moment", ...]):
        self.sigma = sigma
        self.label = label
        self.children = children
        self.height = 1 + max((c.height for c in children), default=0)
        self.size = 1 + sum(c.size for c in children)
        self._key = (label,) + tuple(c._key for c in children)
        self._hash = hash(self._key)
        self._subtrees: frozenset[Moment] | None = None
        self._nodes: _NodeArrays | None = None

    @property
    def key(self):
        return self._key

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return isinstance(other, Moment) and self.sigma == other.sigma and self._key == other._key

    def __lt__(self, other: "Moment") -> bool:
        return self._key < other._key

    def root_label(self) -> TypeSet:
        return TypeSet(self.sigma, self.label)

    def subtrees(self) -> frozenset["Moment"]:
        """All submoments, self included."""
        if self._subtrees is None:
            subs = {self}
            for c in self.children:
                subs |= c.subtrees()
            self._subtrees = frozenset(subs)
        return self._subtrees

    def paths(self) -> list[tuple[int, ...]]:
        """Node addresses in preorder; () is the root."""
        out = [()]
        for i, c in enumerate(self.children):
            out.extend((i,) + p for p in c.paths())
        return out

    def label_at(self, path: tuple[int, ...]) -> int:
        m = self
        for i in path:
            m = m.children[i]
        return m.label

    def node_labels(self) -> frozenset[int]:
        out = {self.label}
        for c in self.children:
            out |= c.node_labels()
        return frozenset(out)

    def to_json(self) -> dict:
        return {"label": [i for i in range(len(self.sigma)) if self.label >> i & 1],
                "children": [c.to_json() for c in self.children]}

    def __repr__(self) -> str:
        return f"Moment({self.sigma.format_mask(self.label)}, {len(self.children)} children)"


@dataclass
class _NodeArrays:
    """Flattened preorder node view used by the fixpoint algorithms."""

    labels: list[int]
    sizes: list[int]           # subtree size; descendants-or-self of i are i..i+sizes[i]
    child_ids: list[list[int]]
    subtree: list[Moment]      # interned subtree rooted at each node


def _arrays(m: Moment) -> _NodeArrays:
    if m._nodes is not None:
        return m._nodes
    labels: list[int] = []
    sizes: list[int] = []
    child_ids: list[list[int]] = []
    subtree: list[Moment] = []

    def emit(node: Moment) -> int:
        me = len(labels)
        labels.append(node.label)
        sizes.append(node.size)
        child_ids.append([])
        subtree.append(node)
        for c in node.children:
            child_ids[me].append(emit(c))
        return me

    emit(m)
    m._nodes = _NodeArrays(labels, sizes, child_ids, subtree)
    return m._nodes


def _sorted_kids(sigma: SigmaContext, children) -> tuple[Moment, ...]:
    kids = tuple(sorted(children, key=lambda c: c._key))
    for c in kids:
        if c.sigma != sigma:
            raise SigmaMismatchError("child moment built over a different context")
    return kids


def moment(sigma: SigmaContext, label: int | TypeSet, children=(),
           validate: bool = True) -> Moment:
    """Intern a moment with the given root label and child moments.

    Children are sorted into canonical order; duplicates are kept, so the
    result represents the given tree up to isomorphism.  With validate on
    (the default) the label must be a type, child root labels must extend
    it, and every defect of the label must be absent from some child's
    root label; those three clauses are exactly what momenthood needs
    given that the children are already moments.
    """
    if isinstance(label, TypeSet):
        if label.sigma != sigma:
            raise SigmaMismatchError("label built over a different context")
        label = label.mask
    kids = _sorted_kids(sigma, children)
    if validate:
        check_kit(sigma, label, kids)
    cache_key = (label, kids)
    cached = sigma._moment_cache.get(cache_key)
    if cached is None:
        cached = Moment(sigma, label, kids)
        sigma._moment_cache[cache_key] = cached
    return cached


def check_kit(sigma: SigmaContext, label: int, kids: tuple[Moment, ...]) -> None:
    """Raise KitError naming the violated clause, or return quietly."""
    if not sigma.is_type_mask(label):
        raise KitError(f"root label is not a type: {sigma.format_mask(label)}")
    for c in kids:
        if label & c.label != label:
            raise KitError(
                f"containment fails: root {sigma.format_mask(label)} not within "
                f"child root {sigma.format_mask(c.label)}")
    for i in sigma.defect_indices(label):
        if all(c.label >> i & 1 for c in kids):
            raise KitError(
                f"defect {sigma.formulas[i]} of {sigma.format_mask(label)} "
                f"is revoked by no child")


def graft(phi: TypeSet, children) -> Moment:
    """Attach a set of child moments below a new root labelled phi.

    Children are treated as a set (duplicates collapse).  Raises KitError
    naming the violated clause when the pieces do not fit together.
    """
    return moment(phi.sigma, phi.mask, set(children), validate=True)


def submoment(m: Moment, path: tuple[int, ...]) -> Moment:
    """The restriction of m to the subtree at the given node address."""
    out = m
    for i in path:
        try:
            out = out.children[i]
        except IndexError:
            raise KeyError(f"no node at {path}") from None
    return out


def below(v: Moment, w: Moment) -> bool:
    """Whether v is a submoment of w (v below w in the moment order)."""
    return v in w.subtrees()


# ---------------------------------------------------------------------------
# Temporal successor

def temporal_successor(v: Moment, w: Moment) -> bool:
    """Whether w can follow v: some relation on nodes pairs the roots,
    relates only sensible label pairs, and is forward confluent.

    Computed as a greatest fixpoint: start from all sensible node pairs,
    repeatedly drop a pair whose source node has a child with no
    surviving partner inside the target's subtree, and answer membership
    of the root pair.  Sensible confluent relations are closed under
    union, so the fixpoint contains the root pair iff some witness
    relation does.
    """
    if v.sigma != w.sigma:
        raise SigmaMismatchError("moments built over different contexts")
    memo = v.sigma._succ_memo
    key = (v, w)
    hit = memo.get(key)
    if hit is not None:
        return hit
    sigma = v.sigma
    if not sigma.sensible_masks(v.label, w.label):
        memo[key] = False
        return False
    av, aw = _arrays(v), _arrays(w)
    nv, nw = len(av.labels), len(aw.labels)
    alive = [[sigma.sensible_masks(av.labels[i], aw.labels[j]) for j in range(nw)]
             for i in range(nv)]
    changed = True
    while changed:
        changed = False
        for i in range(nv):
            row = alive[i]
            for j in range(nw):
                if not row[j]:
                    continue
                for ci in av.child_ids[i]:
                    if not any(alive[ci][j2] for j2 in range(j, j + aw.sizes[j])):
                        row[j] = False
                        changed = True
                        break
    result = alive[0][0]
    memo[key] = result
    return result


# ---------------------------------------------------------------------------
# Reduction and irreducibility

def _proper_retractions(m: Moment):
    """Yield node->node maps that collapse m onto a proper sub-collection.

    A valid map preserves labels, sends each node inside the image of its
    parent (hence is monotone), fixes every node in its image, and misses
    at least one node.  The image, with the induced order, is then itself
    a moment: it inherits the tree shape and continuity by restriction,
    and revocation because the map carries each revoking node to an image
    node with the same label no higher up.
    """
    arrays = _arrays(m)
    n = len(arrays.labels)
    labels = arrays.labels
    sizes = arrays.sizes
    parent = [0] * n
    for i in range(n):
        for c in arrays.child_ids[i]:
            parent[c] = i
    pi = [-1] * n
    forced = [False] * n

    def assign(i: int):
        if i == n:
            if len(set(pi)) < n:
                yield list(pi)
            return
        if i == 0:
            base = [j for j in range(n) if labels[j] == labels[0]]
        else:
            anchor = pi[parent[i]]
            base = [j for j in range(anchor, anchor + sizes[anchor])
                    if labels[j] == labels[i]]
        candidates = [i] if forced[i] else base
        if forced[i] and i not in base:
            return
        for j in candidates:
            if j < i and pi[j] != j:
                continue
            bumped = j > i and not forced[j]
            if bumped:
                forced[j] = True
            pi[i] = j
            yield from assign(i + 1)
            pi[i] = -1
            if bumped:
                forced[j] = False

    yield from assign(0)


def is_irreducible(m: Moment) -> bool:
    """Whether no idempotent monotone label-preserving collapse onto a
    proper sub-collection of nodes exists.

    Two sound quick rejections run first: a node sharing its label with a
    strict descendant, and a node with two identical child subtrees, both
    force reducibility.  Neither is sufficient (a child subtree may fold
    into a sibling without being isomorphic to it), so a search over
    candidate collapses confirms the answer.
    """
    memo = m.sigma._irr_memo
    hit = memo.get(m)
    if hit is not None:
        return hit
    result = _is_irreducible(m)
    memo[m] = result
    return result


def _is_irreducible(m: Moment) -> bool:
    arrays = _arrays(m)
    n = len(arrays.labels)
    for i in range(n):
        li = arrays.labels[i]
        for j in range(i + 1, i + arrays.sizes[i]):
            if arrays.labels[j] == li:
                return False
    for i in range(n):
        kids = arrays.child_ids[i]
        if len(kids) != len({arrays.subtree[c] for c in kids}):
            return False
    return next(_proper_retractions(m), None) is None


def _rebuild(m: Moment, kept: set[int], root: int) -> Moment:
    """Reassemble the moment induced by a kept node set, rooted at root."""
    arrays = _arrays(m)

    def frontier(i: int) -> list[int]:
        out = []
        for c in arrays.child_ids[i]:
            if c in kept:
                out.append(c)
            else:
                out.extend(frontier(c))
        return out

    def build(i: int) -> Moment:
        return moment(m.sigma, arrays.labels[i], [build(c) for c in frontier(i)])

    return build(root)


def reduce(m: Moment) -> Moment:
    """A deterministic irreducible reduct of m with the same root label.

    All single-step collapses are enumerated; among the smallest results
    the canonically least is returned.  A smallest reduct is always
    irreducible because reductions compose.
    """
    memo = m.sigma._reduce_memo
    hit = memo.get(m)
    if hit is not None:
        return hit
    best = m
    for assignment in _proper_retractions(m):
        candidate = _rebuild(m, set(assignment), assignment[0])
        if (candidate.size, candidate.key) < (best.size, best.key):
            best = candidate
    if best is not m and not is_irreducible(best):
        best = reduce(best)
    memo[m] = best
    return best


# ---------------------------------------------------------------------------
# Enumeration of all irreducible moments

@dataclass
class MomentStore:
    """Interned irreducible moments for one context, with completeness status.

    complete is True only when the bottom-up generation exhausted every
    candidate within the caps; consumers must not treat an incomplete
    store as the full space.

    Moments are immutable and the memo tables on the shared context map
    each key to a value that is a pure function of it, so concurrent
    readers at worst recompute an entry; results never depend on the
    interleaving.
    """

    sigma: SigmaContext
    moments: tuple[Moment, ...]
    complete: bool
    by_height: dict[int, tuple[Moment, ...]] = field(default_factory=dict)
    allowed_labels: frozenset[int] | None = None

    def __len__(self) -> int:
        return len(self.moments)

    def index(self) -> dict[Moment, int]:
        return {m: i for i, m in enumerate(self.moments)}

    def is_irreducible(self, m: Moment) -> bool:
        return is_irreducible(m)

    def temporal_successor(self, v: Moment, w: Moment) -> bool:
        return temporal_successor(v, w)


class _CapStop(Exception):
    pass


class _Generation:
    """Bottom-up layered generation of irreducible moments.

    Height-one moments are the defect-free types.  A taller candidate is
    a root type grafted below a set of pairwise distinct, already
    generated irreducibles whose root labels strictly extend it, with at
    least one child of the previous height; each candidate is confirmed
    by the full irreducibility check.  One grow() call produces one
    height layer, so a caller may interleave generation with its own
    searches and stop early; `capped` records whether a resource limit
    cut the space off before it was exhausted.
    """

    def __init__(self, sigma: SigmaContext, caps: Caps = DEFAULT_CAPS,
                 allowed_labels=None, deadline: float | None = None):
        self.sigma = sigma
        self.caps = caps
        self.deadline = caps.deadline() if deadline is None else deadline
        self.allowed = None if allowed_labels is None else frozenset(allowed_labels)
        if self.allowed is not None:
            self.types = [t for t in sigma.type_masks() if t in self.allowed]
        else:
            self.types = list(sigma.type_masks())
        natural = len(sigma) + 1
        self.max_height = caps.max_height if caps.max_height is not None else natural
        self.natural_height = natural
        self.budget = caps.candidate_budget()
        self.examined = 0
        self.count = 0
        self.capped = False
        self.exhausted = False
        self.height = 0
        self.accepted: list[Moment] = []
        self.by_height: dict[int, list[Moment]] = {}

    def _spend(self) -> None:
        self.examined += 1
        if self.count >= self.caps.max_moments or self.examined >= self.budget:
            raise _CapStop
        if (self.deadline is not None and self.examined % 256 == 0
                and time.monotonic() > self.deadline):
            raise _CapStop

    def grow(self) -> list[Moment]:
        """Generate the next height layer; [] once the space is exhausted
        or a cap tripped."""
        if self.capped or self.exhausted:
            return []
        try:
            fresh = self._next_layer()
        except _CapStop:
            self.capped = True
            self.by_height.setdefault(self.height, [])
            return []
        self.by_height[self.height] = fresh
        self.accepted.extend(fresh)
        if not fresh:
            self.exhausted = True
        elif self.height >= self.max_height:
            self.exhausted = True
            if self.max_height < self.natural_height:
                self.capped = True
        return fresh

    def _next_layer(self) -> list[Moment]:
        sigma = self.sigma
        self.height += 1
        if self.height == 1:
            singles = []
            for t in self.types:
                self._spend()
                if not sigma.defect_indices(t):
                    singles.append(moment(sigma, t))
                    self.count += 1
            return singles
        fresh: list[Moment] = []
        newest = self.by_height[self.height - 1]
        older = [m for h in range(1, self.height - 1) for m in self.by_height[h]]
        for root in self.types:
            elig_new = [m for m in newest if root & m.label == root and m.label != root]
            elig_old = [m for m in older if root & m.label == root and m.label != root]
            defect_ids = sigma.defect_indices(root)
            for k_new in range(1, len(elig_new) + 1):
                for new_part in itertools.combinations(elig_new, k_new):
                    for k_old in range(len(elig_old) + 1):
                        for old_part in itertools.combinations(elig_old, k_old):
                            self._spend()
                            kids = new_part + old_part
                            if any(all(c.label >> i & 1 for c in kids)
                                   for i in defect_ids):
                                continue
                            # probe without interning; reducible candidates
                            # must not survive in any cache
                            probe = Moment(sigma, root, _sorted_kids(sigma, kids))
                            if _is_irreducible(probe):
                                kept = moment(sigma, root, kids, validate=False)
                                sigma._irr_memo[kept] = True
                                fresh.append(kept)
                                self.count += 1
        return fresh

    def snapshot(self) -> tuple[Moment, ...]:
        return tuple(sorted(set(self.accepted), key=lambda m: m.key))

    def store(self) -> MomentStore:
        return MomentStore(
            sigma=self.sigma,
            moments=self.snapshot(),
            complete=not self.capped,
            by_height={h: tuple(sorted(ms, key=lambda m: m.key))
                       for h, ms in self.by_height.items()},
            allowed_labels=self.allowed,
        )


def enumerate_irreducibles(sigma: SigmaContext, caps: Caps = DEFAULT_CAPS,
                           allowed_labels=None) -> MomentStore:
    """Generate all irreducible moments bottom-up by height.

    Generation stops once a layer comes out empty (labels grow strictly
    along branches, so no irreducible is taller than the context size
    plus one) or when a cap trips, in which case the store is flagged
    incomplete.

    allowed_labels optionally restricts node labels to a subset of the
    types; the result is then every irreducible all of whose node labels
    lie in that subset.
    """
    gen = _Generation(sigma, caps, allowed_labels)
    while gen.grow():
        pass
    return gen.store()
