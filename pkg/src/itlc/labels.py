"""Subformula contexts, types, defects and sensible pairs.

A SigmaContext is a finite subformula-closed list of formulas with a fixed
index order; every label in the construction is a membership set over it,
stored as an integer bitmask.  A type is a membership set satisfying the
pointwise closure conditions below; a defect of a type is an implication
that neither holds nor has its antecedent, and therefore owes a witness
nearby; a sensible pair is a now/next-compatible pair of types.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import SigmaMismatchError
from .formula import (And, Bottom, Eventually, Forall, Formula, Implies,
                      Next, Or, subformulas)


class SigmaContext:
    """A subformula-closed set of formulas with deterministic indexing.

    Index order is post-order of first occurrence.  Also owns the caches
    shared by everything built over the same context (type enumeration,
    moment interning, memo tables).
    """

    def __init__(self, formulas: tuple[Formula, ...]):
        self.formulas = formulas
        self.index = {f: i for i, f in enumerate(formulas)}
        if len(self.index) != len(formulas):
            raise ValueError("duplicate formulas in context")
        closed = set(formulas)
        for f in formulas:
            for g in subformulas(f):
                if g not in closed:
                    raise ValueError(f"context not subformula-closed: missing {g}")

        self.bottom_index = self.index.get(Bottom())
        self.and_triples = tuple((self.index[f], self.index[f.left], self.index[f.right])
                                 for f in formulas if isinstance(f, And))
        self.or_triples = tuple((self.index[f], self.index[f.left], self.index[f.right])
                                for f in formulas if isinstance(f, Or))
        self.impl_triples = tuple((self.index[f], self.index[f.left], self.index[f.right])
                                  for f in formulas if isinstance(f, Implies))
        self.next_pairs = tuple((self.index[f], self.index[f.body])
                                for f in formulas if isinstance(f, Next))
        self.ev_pairs = tuple((self.index[f], self.index[f.body])
                              for f in formulas if isinstance(f, Eventually))
        self.forall_pairs = tuple((self.index[f], self.index[f.body])
                                  for f in formulas if isinstance(f, Forall))
        self.forall_mask = 0
        for i, _ in self.forall_pairs:
            self.forall_mask |= 1 << i

        self._type_masks: tuple[int, ...] | None = None
        self._moment_cache: dict = {}
        self._irr_memo: dict = {}
        self._succ_memo: dict = {}
        self._reduce_memo: dict = {}

    @classmethod
    def from_formula(cls, f: Formula) -> "SigmaContext":
        return cls(subformulas(f))

    def __len__(self) -> int:
        return len(self.formulas)

    def __contains__(self, f: Formula) -> bool:
        return f in self.index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SigmaContext) and self.formulas == other.formulas

    def __hash__(self) -> int:
        return hash(self.formulas)

    def __repr__(self) -> str:
        return f"SigmaContext({len(self.formulas)} formulas)"

    # -- type machinery on raw masks ------------------------------------

    def is_type_mask(self, mask: int) -> bool:
        if self.bottom_index is not None and mask >> self.bottom_index & 1:
            return False
        for i, l, r in self.and_triples:
            if mask >> i & 1 != (mask >> l & 1 and mask >> r & 1):
                return False
        for i, l, r in self.or_triples:
            if mask >> i & 1 != (mask >> l & 1 or mask >> r & 1):
                return False
        for i, l, r in self.impl_triples:
            if mask >> i & 1 and mask >> l & 1 and not mask >> r & 1:
                return False
            if mask >> r & 1 and not mask >> i & 1:
                return False
        for i, b in self.ev_pairs:
            if mask >> b & 1 and not mask >> i & 1:
                return False
        return True

    def type_masks(self) -> tuple[int, ...]:
        """All type masks in ascending numeric order."""
        if self._type_masks is None:
            self._type_masks = tuple(m for m in range(1 << len(self.formulas))
                                     if self.is_type_mask(m))
        return self._type_masks

    def defect_indices(self, mask: int) -> tuple[int, ...]:
        return tuple(i for i, l, _ in self.impl_triples
                     if not mask >> i & 1 and not mask >> l & 1)

    def sensible_masks(self, now: int, nxt: int) -> bool:
        for i, b in self.next_pairs:
            if now >> i & 1 != nxt >> b & 1:
                return False
        for i, b in self.ev_pairs:
            if now >> i & 1 != (now >> b & 1 or nxt >> i & 1):
                return False
        if now & self.forall_mask != nxt & self.forall_mask:
            return False
        return True

    def format_mask(self, mask: int) -> str:
        members = [str(self.formulas[i]) for i in range(len(self.formulas)) if mask >> i & 1]
        return "{" + ", ".join(members) + "}"


def subformula_closure(f: Formula) -> SigmaContext:
    """Smallest subformula-closed context containing f."""
    return SigmaContext.from_formula(f)


@dataclass(frozen=True)
class TypeSet:
    """A type over a context: a membership mask satisfying the closure rules."""

    sigma: SigmaContext
    mask: int

    def __post_init__(self):
        if not self.sigma.is_type_mask(self.mask):
            raise ValueError(f"not a type: {self.sigma.format_mask(self.mask)}")

    def __contains__(self, f: Formula) -> bool:
        i = self.sigma.index.get(f)
        return i is not None and self.mask >> i & 1 == 1

    def members(self) -> tuple[Formula, ...]:
        return tuple(f for i, f in enumerate(self.sigma.formulas) if self.mask >> i & 1)

    def indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(len(self.sigma)) if self.mask >> i & 1)

    def __repr__(self) -> str:
        return f"TypeSet({self.sigma.format_mask(self.mask)})"


def type_set(sigma: SigmaContext, members) -> TypeSet:
    """Build a TypeSet from an iterable of formulas."""
    mask = 0
    for f in members:
        if f not in sigma.index:
            raise SigmaMismatchError(f"{f} not in context")
        mask |= 1 << sigma.index[f]
    return TypeSet(sigma, mask)


def enumerate_types(sigma: SigmaContext) -> list[TypeSet]:
    """All types over the context, in canonical (numeric) order."""
    return [TypeSet(sigma, m) for m in sigma.type_masks()]


def defects(phi: TypeSet) -> tuple[Formula, ...]:
    """The implications owed a witness: absent together with their antecedent."""
    return tuple(phi.sigma.formulas[i] for i in phi.sigma.defect_indices(phi.mask))


def sensible_pair(phi: TypeSet, psi: TypeSet) -> bool:
    """Whether (phi, psi) is consistent as a now/next pair of types.

    Next-formulas transfer to the successor body, eventualities unfold
    (now iff realized now or owed next), and universally quantified
    members agree on both sides.
    """
    if phi.sigma is not psi.sigma and phi.sigma != psi.sigma:
        raise SigmaMismatchError("types built over different contexts")
    return phi.sigma.sensible_masks(phi.mask, psi.mask)


# ---------------------------------------------------------------------------
# Universal profiles and label viability

def profile_masks(sigma: SigmaContext) -> list[int]:
    """All subsets of the universally quantified formulas, canonical order.

    A profile fixes which forall-formulas appear in every label of a
    candidate structure; the subsets are ordered by ascending mask.
    """
    forall_indices = [i for i, _ in sigma.forall_pairs]
    masks = []
    for bits in itertools.product((0, 1), repeat=len(forall_indices)):
        m = 0
        for take, i in zip(bits, reversed(forall_indices)):
            if take:
                m |= 1 << i
        masks.append(m)
    return sorted(set(masks))


def profile_compatible(sigma: SigmaContext, profile: int, mask: int) -> bool:
    """Label agrees with the profile and carries every promised body."""
    if mask & sigma.forall_mask != profile:
        return False
    for i, b in sigma.forall_pairs:
        if profile >> i & 1 and not mask >> b & 1:
            return False
    return True


def viable_types(sigma: SigmaContext, profile: int) -> frozenset[int]:
    """Greatest set of profile-compatible types closed under the survival rules.

    Every label occurring anywhere in a serial, eventually-realizing,
    profile-honest structure must (a) have a sensible successor among the
    surviving labels, (b) realize each of its eventualities along a
    sensible path of surviving labels, and (c) have, for each of its
    defects, a strictly larger surviving label witnessing the antecedent
    without the consequent.  Pruning to the greatest such set is sound:
    a type outside it can appear in no such structure.
    """
    alive = {m for m in sigma.type_masks() if profile_compatible(sigma, profile, m)}
    changed = True
    while changed:
        changed = False
        for m in sorted(alive):
            if not any(sigma.sensible_masks(m, m2) for m2 in alive):
                alive.discard(m)
                changed = True
                continue
            ok = True
            for i, b in sigma.ev_pairs:
                if m >> i & 1 and not _reachable_realization(sigma, alive, m, b):
                    ok = False
                    break
            if ok:
                for i in sigma.defect_indices(m):
                    _, a, c = next(t for t in sigma.impl_triples if t[0] == i)
                    if not any(v != m and v & m == m and v >> a & 1 and not v >> c & 1
                               for v in alive):
                        ok = False
                        break
            if not ok:
                alive.discard(m)
                changed = True
    return frozenset(alive)


def _reachable_realization(sigma: SigmaContext, alive: set[int], start: int, body: int) -> bool:
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for m in frontier:
            if m >> body & 1:
                return True
            for m2 in alive:
                if m2 not in seen and sigma.sensible_masks(m, m2):
                    seen.add(m2)
                    nxt.append(m2)
        frontier = nxt
    return False
