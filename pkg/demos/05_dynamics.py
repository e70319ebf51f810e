"""Dynamics expressed in the logic: minimality and recurrence.

Two asymptotic properties of a system are equivalent to the validity of
single formulas on it:

    minimal    <=>  E p -> <>p        (every orbit is dense)
    recurrent  <=>  p -> ~~X<>p       (every open returns into itself)

and connected systems validate  A(p | ~p) -> (A p | A~p).
This demo checks all three equivalences on every labelled system with up
to three points and a sample of random larger ones.

Run:  python demos/05_dynamics.py
"""

import itlc

MINIMAL = itlc.parse("E p -> <>p")
RECURRENT = itlc.parse("p -> ~~X<>p")
CONNECTED = itlc.parse("A(p | ~p) -> (A p | A~p)")


def harness():
    for n in (1, 2, 3):
        yield from itlc.enumerate_systems(n)
    for seed in range(100):
        yield itlc.random_system(1 + seed % 5, seed)


counts = {"systems": 0, "minimal": 0, "recurrent": 0, "connected": 0}
for X in harness():
    a = itlc.analyze(X)
    assert a.minimal == itlc.is_valid_on_system(X, MINIMAL)
    assert a.recurrent == itlc.is_valid_on_system(X, RECURRENT)
    if a.connected:
        assert itlc.is_valid_on_system(X, CONNECTED)
    counts["systems"] += 1
    counts["minimal"] += a.minimal
    counts["recurrent"] += a.recurrent
    counts["connected"] += a.connected

print("=" * 64)
print("Characterizations confirmed on the harness")
print("=" * 64)
print(f"  systems checked : {counts['systems']}")
print(f"  minimal         : {counts['minimal']}")
print(f"  recurrent       : {counts['recurrent']}")
print(f"  connected       : {counts['connected']}")

print()
print("The disconnected two-point antichain falsifies the connectedness law:")
antichain = itlc.system(["a", "b"], [], {"a": "a", "b": "b"})
print("  valid on antichain?", itlc.is_valid_on_system(antichain, CONNECTED))

print()
print("=" * 64)
print("Countermodels double as quasimodel sources")
print("=" * 64)
f = itlc.parse("p -> X p")
found = itlc.find_countermodel(f, 3)
print(f"smallest countermodel of {f}: {len(found.system)} points,",
      f"fails at {found.point}")
sigma = itlc.subformula_closure(f)
q = itlc.extract_quasimodel(found.system, found.valuation, sigma)
print(f"extracted quasimodel: {len(q.worlds)} worlds;",
      "falsifies:", ", ".join(str(g) for g in itlc.falsified_members(q)))
print("structure checks out:", bool(itlc.check_quasimodel(q)))
