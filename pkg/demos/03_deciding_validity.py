"""The decision procedure.

A formula is falsifiable over dynamical topological systems exactly when
a finite quasimodel over its subformula context falsifies it.  The
worlds of a quasimodel are irreducible moments: finite labelled trees in
which labels grow along branches and every defective implication is
revoked below.  decide() searches for such a structure per universal
profile, and certifies whichever verdict it reaches.

Run:  python demos/03_deciding_validity.py
"""

import itlc

SUITE = [
    "p -> p",
    "<>p <-> (p | X<>p)",
    "X(p & q) <-> (X p & X q)",
    "X(p -> q) -> (X p -> X q)",
    "X p -> p",
    "<>p -> p",
    "p -> X p",
    "E p -> <>p",
    "A(~p | <>p) -> (~<>p | <>p)",
]

print("=" * 72)
print("Verdicts")
print("=" * 72)
for text in SUITE:
    verdict = itlc.decide(itlc.parse(text))
    detail = ""
    if verdict.certificate is not None:
        q = verdict.certificate.quasimodel
        detail = f"  [{len(q.worlds)} worlds, witness {verdict.certificate.witness}]"
    print(f"  {text:36} {verdict.kind}{detail}")

print()
print("=" * 72)
print("Why the last one is interesting")
print("=" * 72)
phi = itlc.parse("A(~p | <>p) -> (~<>p | <>p)")
print("A(~p | <>p) -> (~<>p | <>p) holds on every *Alexandroff* system:")
print("  countermodel search up to 4 points:",
      itlc.find_countermodel(phi, 4, itlc.Caps(max_systems=10**6)))
print("yet it is falsifiable over dynamical systems in general, which a")
print("small quasimodel certifies:")
verdict = itlc.decide(phi)
q = verdict.certificate.quasimodel
for i, m in enumerate(q.worlds):
    flag = "  <- witness" if i == verdict.certificate.witness else ""
    print(f"  world {i} ({m.size} node{'s' if m.size > 1 else ''}): "
          f"{q.sigma.format_mask(m.label)}{flag}")
print("  edges:", sorted(q.s_edges))
print()
print("per-profile outcomes:")
for line in verdict.profile_outcomes:
    print("  ", line)
