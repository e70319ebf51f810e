"""Quasimodel search, certificates, and certificate verification.

A quasimodel is a finite downward-closed collection of moments carrying
a successor relation that is sensible on root labels, forward confluent
over the submoment order, serial, realizes every eventuality, and is
honest about universally quantified formulas.  A formula is falsifiable
exactly when some quasimodel over its subformula context contains a
world whose root label omits it, so falsifiability search is a greatest
fixpoint over the irreducible moments per universal profile, and a
validity verdict needs a proof that no such structure exists.

Two sound refutation routes back the VALID verdict: a label-viability
fixpoint that rules a profile out at the type level (every label in a
candidate structure needs a sensible successor, realizable
eventualities, and strictly larger revokers for its defects, all among
surviving labels), and exhaustive enumeration when it completes within
caps.  FALSIFIABLE verdicts always ship a certificate that is
re-verified from raw data before being reported.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

from .config import Caps, DEFAULT_CAPS
from .errors import (CapExceeded, FragmentError, InvariantViolation,
                     ItlcError, SchemaError)
from .formula import (Forall, Formula, eliminate_exists, format_formula,
                      in_diamond_fragment, parse)
from .labels import (SigmaContext, profile_compatible, profile_masks,
                     subformula_closure, viable_types)
from .moments import (Moment, MomentStore, _Generation, below, check_kit,
                      enumerate_irreducibles, moment, temporal_successor)


@dataclass(frozen=True)
class Check:
    """Boolean outcome with the first violated clause named."""

    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Quasimodel:
    """Worlds (moments) with a successor relation and a universal profile.

    Worlds are kept in canonical order; edges are index pairs.  profile
    is a mask over the context's universally quantified formulas, or
    None when the structure was not built against a fixed profile.
    """

    sigma: SigmaContext
    worlds: tuple[Moment, ...]
    s_edges: frozenset[tuple[int, int]]
    profile: int | None = None

    def world_index(self) -> dict[Moment, int]:
        return {m: i for i, m in enumerate(self.worlds)}

    def successors(self, i: int) -> list[int]:
        return sorted(j for a, j in self.s_edges if a == i)

    def order_pairs(self) -> list[tuple[int, int]]:
        """Strict submoment pairs (a, b) with world a below world b."""
        idx = self.world_index()
        out = []
        for b, mb in enumerate(self.worlds):
            for sub in mb.subtrees():
                a = idx.get(sub)
                if a is not None and a != b:
                    out.append((a, b))
        return sorted(out)

    def root_lacks(self, index: int, formula_index: int) -> bool:
        return not self.worlds[index].label >> formula_index & 1


class Lasso(NamedTuple):
    prefix: tuple[int, ...]
    loop: tuple[int, ...]


# ---------------------------------------------------------------------------
# Quasimodel validation

def check_quasimodel(q: Quasimodel) -> Check:
    """Re-check every structural condition, naming the first failure."""
    sigma = q.sigma
    if not q.worlds:
        return Check(False, "no worlds")
    idx = q.world_index()
    if len(idx) != len(q.worlds):
        return Check(False, "duplicate worlds")
    for i, m in enumerate(q.worlds):
        for sub in m.subtrees():
            try:
                check_kit(sigma, sub.label, sub.children)
            except ItlcError as err:
                return Check(False, f"world {i} is not a moment: {err}")
            if sub not in idx:
                return Check(False, f"world {i} has a submoment that is not a world")
    n = len(q.worlds)
    for a, b in q.s_edges:
        if not (0 <= a < n and 0 <= b < n):
            return Check(False, f"edge ({a},{b}) out of range")
        if not sigma.sensible_masks(q.worlds[a].label, q.worlds[b].label):
            return Check(False, f"edge ({a},{b}) is not sensible")
    for i in range(n):
        if not any(a == i for a, _ in q.s_edges):
            return Check(False, f"world {i} has no successor")
    for a, b in q.s_edges:
        for sub in q.worlds[a].subtrees():
            a2 = idx[sub]
            if not any((a2, idx[t]) in q.s_edges for t in q.worlds[b].subtrees()):
                return Check(False,
                             f"edge ({a},{b}) not confluent below world {a2}")
    for i in range(n):
        label = q.worlds[i].label
        for fi, fb in sigma.ev_pairs:
            if label >> fi & 1 and not _realized_from(q, i, fb):
                return Check(False,
                             f"eventuality {sigma.formulas[fi]} of world {i} unrealized")
    for fi, fb in sigma.forall_pairs:
        everywhere_f = all(m.label >> fi & 1 for m in q.worlds)
        everywhere_b = all(m.label >> fb & 1 for m in q.worlds)
        if everywhere_f != everywhere_b:
            return Check(False, f"labels dishonest about {sigma.formulas[fi]}")
    if q.profile is not None:
        for i, m in enumerate(q.worlds):
            for label in m.node_labels():
                if not profile_compatible(sigma, q.profile, label):
                    return Check(False, f"world {i} disagrees with the profile")
    return Check(True)


def _realized_from(q: Quasimodel, start: int, body: int) -> bool:
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for i in frontier:
            if q.worlds[i].label >> body & 1:
                return True
            for j in q.successors(i):
                if j not in seen:
                    seen.add(j)
                    nxt.append(j)
        frontier = nxt
    return False


# ---------------------------------------------------------------------------
# Profile pruning

def _profile_mask(sigma: SigmaContext, profile) -> int:
    if isinstance(profile, int):
        if profile & ~sigma.forall_mask:
            raise ValueError("profile mask contains non-universal indices")
        return profile
    mask = 0
    for f in profile:
        if not isinstance(f, Forall) or f not in sigma.index:
            raise ValueError(f"not a universally quantified member: {f}")
        mask |= 1 << sigma.index[f]
    return mask


def prune_profile(store: MomentStore, profile, order=None) -> Quasimodel:
    """Greatest subset of the store that can sit inside a quasimodel
    whose labels follow the given universal profile.

    Iterated removal to a fixpoint: drop a moment whose node labels
    disagree with the profile, whose submoments are not all present,
    which has no surviving successor, or one of whose root eventualities
    is unrealizable along surviving successors.  Removal order never
    affects the result; `order` exists so tests can demonstrate that.
    """
    return _prune(store.sigma, store.moments,
                  _profile_mask(store.sigma, profile), order, None)


def _prune(sigma: SigmaContext, moments, mask: int, order=None,
           deadline: float | None = None) -> Quasimodel:
    alive = {m for m in moments
             if all(profile_compatible(sigma, mask, l) for l in m.node_labels())}
    sweep = list(moments) if order is None else list(order)
    changed = True
    while changed:
        if deadline is not None and time.monotonic() > deadline:
            raise CapExceeded("profile pruning ran out of time")
        changed = False
        for m in sweep:
            if m not in alive:
                continue
            if not _survives(sigma, m, alive):
                alive.discard(m)
                changed = True
    worlds = tuple(sorted(alive, key=lambda m: m.key))
    edges = frozenset((i, j) for i, v in enumerate(worlds) for j, w in enumerate(worlds)
                      if temporal_successor(v, w))
    return Quasimodel(sigma, worlds, edges, mask)


def _survives(sigma: SigmaContext, m: Moment, alive: set[Moment]) -> bool:
    if any(sub not in alive for sub in m.subtrees() if sub is not m):
        return False
    if not any(temporal_successor(m, w) for w in alive):
        return False
    for fi, fb in sigma.ev_pairs:
        if m.label >> fi & 1:
            seen = {m}
            frontier = [m]
            found = False
            while frontier and not found:
                nxt = []
                for v in frontier:
                    if v.label >> fb & 1:
                        found = True
                        break
                    for w in alive:
                        if w not in seen and temporal_successor(v, w):
                            seen.add(w)
                            nxt.append(w)
                frontier = nxt
            if not found:
                return False
    return True


# ---------------------------------------------------------------------------
# Realizing paths

def build_realizing_path(q: Quasimodel, start: int) -> Lasso:
    """A lasso from the given world whose unrolling realizes every
    eventuality it ever promises.

    Pending eventualities are served round robin: step along a shortest
    path towards the oldest pending one, dropping whatever the current
    label realizes, and close the loop when a (world, pending) state
    repeats.  States are finitely many, so this terminates.
    """
    sigma = q.sigma
    succ = {i: q.successors(i) for i in range(len(q.worlds))}
    trail: list[int] = []
    visited: dict[tuple[int, tuple[int, ...]], int] = {}
    queue: list[int] = []
    w = start
    while True:
        label = q.worlds[w].label
        queue = [b for b in queue if not label >> b & 1]
        for fi, fb in sigma.ev_pairs:
            if label >> fi & 1 and not label >> fb & 1 and fb not in queue:
                queue.append(fb)
        state = (w, tuple(queue))
        if state in visited:
            k = visited[state]
            lasso = Lasso(tuple(trail[:k]), tuple(trail[k:]))
            problem = _lasso_problem(q, start, lasso)
            if problem is not None:
                raise InvariantViolation(f"constructed lasso invalid: {problem}")
            return lasso
        visited[state] = len(trail)
        trail.append(w)
        if queue:
            w = _step_towards(q, succ, w, queue[0])
        else:
            if not succ[w]:
                raise InvariantViolation(f"world {w} has no successor")
            w = succ[w][0]


def _step_towards(q: Quasimodel, succ: dict[int, list[int]], start: int, body: int) -> int:
    """First edge of the canonical shortest path realizing the eventuality."""
    parent: dict[int, int] = {start: start}
    frontier = [start]
    while frontier:
        nxt = []
        for i in frontier:
            for j in succ[i]:
                if j not in parent:
                    parent[j] = i
                    if q.worlds[j].label >> body & 1:
                        while parent[j] != start:
                            j = parent[j]
                        return j
                    nxt.append(j)
        frontier = sorted(nxt)
    raise InvariantViolation(f"unrealizable eventuality reached from world {start}")


def _lasso_problem(q: Quasimodel, start: int, lasso: Lasso) -> str | None:
    sigma = q.sigma
    if not lasso.loop:
        return "empty loop"
    seq = list(lasso.prefix) + list(lasso.loop)
    if seq[0] != start:
        return "lasso does not start at its world"
    for a, b in zip(seq, seq[1:]):
        if (a, b) not in q.s_edges:
            return f"missing edge ({a},{b})"
    if (seq[-1], lasso.loop[0]) not in q.s_edges:
        return "loop does not close"
    loop_start = len(lasso.prefix)
    for pos, i in enumerate(seq):
        label = q.worlds[i].label
        for fi, fb in sigma.ev_pairs:
            if not label >> fi & 1:
                continue
            if pos < loop_start:
                tail = seq[pos:]
            else:
                tail = seq[loop_start:]
            if not any(q.worlds[j].label >> fb & 1 for j in tail):
                return f"eventuality {sigma.formulas[fi]} unrealized at position {pos}"
    return None


def complete_path_below(q: Quasimodel, path: list[int], v0: int) -> list[int]:
    """Shadow a successor path from below: given a path and a world under
    its first element, return a path of the same length staying under it
    pointwise, choosing the canonically least world at each step.
    """
    if not path:
        raise ValueError("empty path")
    for a, b in zip(path, path[1:]):
        if (a, b) not in q.s_edges:
            raise ValueError(f"({a},{b}) is not an edge")
    if not below(q.worlds[v0], q.worlds[path[0]]):
        raise ValueError("start world is not below the path start")
    idx = q.world_index()
    out = [v0]
    for b in path[1:]:
        beneath = sorted(idx[t] for t in q.worlds[b].subtrees() if t in idx)
        step = next((u for u in beneath if (out[-1], u) in q.s_edges), None)
        if step is None:
            raise InvariantViolation("confluence failed while completing a path")
        out.append(step)
    return out


# ---------------------------------------------------------------------------
# Certificates

@dataclass(frozen=True)
class Certificate:
    """A falsification witness: a quasimodel, a world omitting the target,
    and a realizing lasso for every world."""

    target: Formula
    quasimodel: Quasimodel
    witness: int
    lassos: dict[int, Lasso]

    def to_json_dict(self) -> dict:
        q = self.quasimodel
        sigma = q.sigma
        profile = [] if q.profile is None else [i for i in range(len(sigma))
                                                if q.profile >> i & 1]
        return {
            "sigma": [format_formula(f) for f in sigma.formulas],
            "profile": profile,
            "worlds": [{"id": i, "moment": m.to_json()} for i, m in enumerate(q.worlds)],
            "order": [list(p) for p in q.order_pairs()],
            "s_edges": [list(p) for p in sorted(q.s_edges)],
            "witness": self.witness,
            "target": format_formula(self.target),
            "lassos": {str(i): {"prefix": list(l.prefix), "loop": list(l.loop)}
                       for i, l in sorted(self.lassos.items())},
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def _moment_from_json(sigma: SigmaContext, data, where: str) -> Moment:
    if not isinstance(data, dict) or "label" not in data or "children" not in data:
        raise SchemaError(f"{where}: moment object needs 'label' and 'children'")
    mask = 0
    for i in data["label"]:
        if not isinstance(i, int) or not 0 <= i < len(sigma):
            raise SchemaError(f"{where}.label: bad index {i!r}")
        mask |= 1 << i
    kids = [_moment_from_json(sigma, c, f"{where}.children[{k}]")
            for k, c in enumerate(data["children"])]
    return moment(sigma, mask, kids, validate=True)


def certificate_from_json(data: dict, target: Formula) -> Certificate:
    """Rebuild a certificate from its JSON form, canonicalizing world ids."""
    check = verify_certificate(data, target)
    if not check:
        raise SchemaError(f"certificate invalid: {check.reason}")
    reduced = eliminate_exists(target)
    sigma = subformula_closure(reduced)
    by_id = {w["id"]: _moment_from_json(sigma, w["moment"], "worlds")
             for w in data["worlds"]}
    worlds = tuple(sorted(by_id.values(), key=lambda m: m.key))
    idx = {m: i for i, m in enumerate(worlds)}
    remap = {wid: idx[m] for wid, m in by_id.items()}
    edges = frozenset((remap[a], remap[b]) for a, b in data["s_edges"])
    profile = 0
    for i in data["profile"]:
        profile |= 1 << i
    lassos = {remap[int(k)]: Lasso(tuple(remap[i] for i in v["prefix"]),
                                   tuple(remap[i] for i in v["loop"]))
              for k, v in data["lassos"].items()}
    return Certificate(target=target,
                       quasimodel=Quasimodel(sigma, worlds, edges, profile),
                       witness=remap[data["witness"]],
                       lassos=lassos)


def verify_certificate(cert, target: Formula) -> Check:
    """Re-derive the context and re-check every invariant from raw data.

    Nothing from the producer is trusted: the context is rebuilt from the
    target formula, every world is revalidated as a moment, the listed
    order is recomputed, and the edge, honesty, witness and lasso
    conditions are all checked directly.
    """
    data = cert.to_json_dict() if isinstance(cert, Certificate) else cert
    try:
        return _verify(data, target)
    except (ItlcError, KeyError, TypeError, ValueError) as err:
        return Check(False, f"malformed certificate: {err}")


def _verify(data: dict, target: Formula) -> Check:
    if parse(data["target"]) != target:
        return Check(False, "target mismatch")
    reduced = eliminate_exists(target)
    if not in_diamond_fragment(reduced):
        return Check(False, "target outside the decidable fragment")
    sigma = subformula_closure(reduced)
    listed = [parse(s) for s in data["sigma"]]
    if tuple(listed) != sigma.formulas:
        return Check(False, "sigma does not match the target's subformula closure")

    profile = 0
    for i in data["profile"]:
        if not isinstance(i, int) or not sigma.forall_mask >> i & 1:
            return Check(False, f"profile index {i!r} is not a universal formula")
        profile |= 1 << i

    ids = [w["id"] for w in data["worlds"]]
    if len(set(ids)) != len(ids):
        return Check(False, "duplicate world ids")
    try:
        by_id = {w["id"]: _moment_from_json(sigma, w["moment"], f"worlds[{w['id']}]")
                 for w in data["worlds"]}
    except ItlcError as err:
        return Check(False, f"world is not a moment: {err}")
    if len(set(by_id.values())) != len(by_id):
        return Check(False, "two ids name the same moment")

    worlds = tuple(sorted(by_id.values(), key=lambda m: m.key))
    idx = {m: i for i, m in enumerate(worlds)}
    remap = {wid: idx[m] for wid, m in by_id.items()}
    edges = set()
    for pair in data["s_edges"]:
        a, b = pair
        if a not in remap or b not in remap:
            return Check(False, f"edge {pair} references an unknown world")
        edges.add((remap[a], remap[b]))
    q = Quasimodel(sigma, worlds, frozenset(edges), profile)

    listed_order = {(remap[a], remap[b]) for a, b in data["order"]}
    if listed_order != set(q.order_pairs()):
        return Check(False, "listed order disagrees with the submoment relation")

    structural = check_quasimodel(q)
    if not structural:
        return structural

    if data["witness"] not in remap:
        return Check(False, "witness id unknown")
    witness = remap[data["witness"]]
    if reduced not in sigma.index:
        return Check(False, "target not in its own closure")
    if not q.root_lacks(witness, sigma.index[reduced]):
        return Check(False, "witness root label contains the target")

    lassos = data["lassos"]
    for i in range(len(worlds)):
        orig = next(wid for wid, j in remap.items() if j == i)
        entry = lassos.get(str(orig))
        if entry is None:
            return Check(False, f"world {orig} has no lasso")
        lasso = Lasso(tuple(remap[k] for k in entry["prefix"]),
                      tuple(remap[k] for k in entry["loop"]))
        problem = _lasso_problem(q, i, lasso)
        if problem is not None:
            return Check(False, f"lasso for world {orig}: {problem}")
    return Check(True)


def save_certificate(cert: Certificate, path) -> None:
    """Write the canonical JSON form; bit-exact across runs."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(cert.to_json_text())
        fh.write("\n")


def load_certificate(path, target: Formula) -> Certificate:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return certificate_from_json(data, target)


# ---------------------------------------------------------------------------
# The decision procedure

@dataclass(frozen=True)
class Verdict:
    """Outcome of decide: VALID, FALSIFIABLE (with certificate), or
    RESOURCE_LIMIT.  complete is True exactly when the verdict is
    definitive: a VALID answer always rests on conclusive refutations,
    a certificate proves FALSIFIABLE on its own, and a capped search is
    never definitive."""

    kind: str
    certificate: Certificate | None
    complete: bool
    profile_outcomes: tuple[str, ...] = ()


def decide(target: Formula, caps: Caps = DEFAULT_CAPS) -> Verdict:
    """Decide validity of a formula over dynamical topological systems.

    The formula is rewritten without existential quantifiers and must
    then use only next/eventually/forall.  Each universal profile is
    first screened by the label-viability fixpoint; profiles it refutes
    admit no falsifying structure at all.  For the remaining profiles,
    irreducible moments are generated height by height over the viable
    labels and pruned after each layer; a surviving world omitting the
    target (plus honesty witnesses) yields FALSIFIABLE with a verified
    certificate as soon as it appears, which is sound because a pruning
    fixpoint over a subtree-closed partial carrier is already a
    quasimodel.  VALID is reported only when every profile was
    conclusively refuted, either at the type level or by an exhausted
    generation; a capped search falls back to RESOURCE_LIMIT.
    """
    reduced = eliminate_exists(target)
    if not in_diamond_fragment(reduced):
        raise FragmentError(
            "decide handles next/eventually/forall formulas (after removing "
            f"existentials); got {format_formula(reduced)}")
    deadline = caps.deadline()
    sigma = subformula_closure(reduced)
    target_idx = sigma.index[reduced]
    forall_bodies = dict(sigma.forall_pairs)

    outcomes = {}
    needing: list[tuple[int, frozenset[int]]] = []
    for profile in profile_masks(sigma):
        viable = viable_types(sigma, profile)
        if _type_witness(sigma, profile, viable, target_idx, forall_bodies):
            needing.append((profile, viable))
        else:
            outcomes[profile] = "refuted by label viability"
    if not needing:
        return Verdict("VALID", None, True, _outcome_list(sigma, outcomes))

    allowed = frozenset().union(*(v for _, v in needing))
    generation = _Generation(sigma, caps, allowed_labels=allowed, deadline=deadline)
    profiles = [p for p, _ in needing]

    def search(carrier, profile: int):
        q = _prune(sigma, carrier, profile, None, deadline)
        return q, _moment_witness(q, sigma, profile, target_idx, forall_bodies)

    capped = False
    try:
        while generation.grow():
            carrier = generation.snapshot()
            if caps.jobs > 1 and len(profiles) > 1:
                with ThreadPoolExecutor(max_workers=caps.jobs) as pool:
                    results = list(pool.map(lambda p: search(carrier, p), profiles))
            else:
                results = [search(carrier, p) for p in profiles]
            for profile, (q, witness) in zip(profiles, results):
                if witness is None:
                    continue
                outcomes[profile] = "falsifiable"
                for other in profiles:
                    outcomes.setdefault(other, "not settled before falsification")
                lassos = {i: build_realizing_path(q, i) for i in range(len(q.worlds))}
                cert = Certificate(target=target, quasimodel=q,
                                   witness=witness, lassos=lassos)
                confirmed = verify_certificate(cert, target)
                if not confirmed:
                    raise InvariantViolation(
                        f"emitted certificate failed: {confirmed.reason}")
                return Verdict("FALSIFIABLE", cert, True,
                               _outcome_list(sigma, outcomes))
    except CapExceeded:
        capped = True
    capped = capped or generation.capped

    for profile in profiles:
        outcomes[profile] = ("inconclusive (capped)" if capped
                             else "no witness in complete enumeration")
    if not capped:
        return Verdict("VALID", None, True, _outcome_list(sigma, outcomes))
    return Verdict("RESOURCE_LIMIT", None, False, _outcome_list(sigma, outcomes))


def _type_witness(sigma: SigmaContext, profile: int, viable: frozenset[int],
                  target_idx: int, forall_bodies: dict[int, int]) -> bool:
    if not any(not t >> target_idx & 1 for t in viable):
        return False
    for fi, fb in forall_bodies.items():
        if not profile >> fi & 1:
            if not any(not t >> fb & 1 for t in viable):
                return False
    return True


def _moment_witness(q: Quasimodel, sigma: SigmaContext, profile: int,
                    target_idx: int, forall_bodies: dict[int, int]) -> int | None:
    witness = next((i for i in range(len(q.worlds)) if q.root_lacks(i, target_idx)), None)
    if witness is None:
        return None
    for fi, fb in forall_bodies.items():
        if not profile >> fi & 1:
            if not any(q.root_lacks(i, fb) for i in range(len(q.worlds))):
                return None
    return witness


def _outcome_list(sigma: SigmaContext, outcomes: dict[int, str]) -> tuple[str, ...]:
    out = []
    for profile, text in sorted(outcomes.items()):
        names = [str(sigma.formulas[i]) for i in range(len(sigma)) if profile >> i & 1]
        out.append(f"profile {{{', '.join(names)}}}: {text}")
    return tuple(out)


# ---------------------------------------------------------------------------
# Extraction from finite systems

def extract_quasimodel(system, valuation, sigma: SigmaContext,
                       caps: Caps = DEFAULT_CAPS) -> Quasimodel:
    """Project a finite Alexandroff model onto its quasimodel.

    Point labels come from the model checker.  The maximal
    label-preserving continuous simulation between irreducible moments
    and points is computed by pruning pairs: a pair dies when some child
    of the moment has no partner in the point's minimal neighborhood.
    The moments simulating at least one point, with the successor
    relation, form a quasimodel that falsifies exactly the context
    formulas the model falsifies; surjectivity and dynamicity of the
    simulation are asserted rather than assumed.
    """
    from . import alexandroff

    point_labels = []
    truth = {f: alexandroff.evaluate(system, valuation, f) for f in sigma.formulas}
    for i, name in enumerate(system.names):
        mask = 0
        for f, members in truth.items():
            if name in members:
                mask |= 1 << sigma.index[f]
        if not sigma.is_type_mask(mask):
            raise InvariantViolation(f"point {name} carries a non-type label")
        point_labels.append(mask)

    store = enumerate_irreducibles(sigma, caps,
                                   allowed_labels=frozenset(point_labels))
    if not store.complete:
        raise CapExceeded("irreducible enumeration over the point labels was cut off")

    n = len(system.names)
    alive: set[tuple[Moment, int]] = {(m, x) for m in store.moments for x in range(n)
                                      if m.label == point_labels[x]}
    changed = True
    while changed:
        changed = False
        for m, x in sorted(alive, key=lambda p: (p[0].key, p[1])):
            down = system.down[x]
            ok = True
            for c in m.children:
                if not any((c, y) in alive for y in range(n) if down >> y & 1):
                    ok = False
                    break
            if not ok:
                alive.discard((m, x))
                changed = True

    covered = {x for _, x in alive}
    if covered != set(range(n)):
        missing = [system.names[x] for x in range(n) if x not in covered]
        raise InvariantViolation(f"simulation misses points {missing}")

    worlds = tuple(sorted({m for m, _ in alive}, key=lambda m: m.key))
    idx = {m: i for i, m in enumerate(worlds)}
    edges = frozenset((i, j) for i, v in enumerate(worlds) for j, w in enumerate(worlds)
                      if temporal_successor(v, w))
    for m, x in alive:
        y = system.f[x]
        if not any(temporal_successor(m, w) and (w, y) in alive for w in worlds):
            raise InvariantViolation("simulation is not dynamic")

    forall_part = worlds[0].label & sigma.forall_mask if worlds else 0
    q = Quasimodel(sigma, worlds, edges, forall_part)
    confirmed = check_quasimodel(q)
    if not confirmed:
        raise InvariantViolation(f"extracted structure invalid: {confirmed.reason}")
    return q


def falsified_members(q: Quasimodel) -> tuple[Formula, ...]:
    """Context formulas some world's root label omits."""
    out = []
    for i, f in enumerate(q.sigma.formulas):
        if any(not m.label >> i & 1 for m in q.worlds):
            out.append(f)
    return tuple(out)
