"""Model checking finite Alexandroff dynamical systems.

The bundled five-point system is minimal but disconnected, and its map
is not open; it falsifies the next/implication interchange law.

Run:  python demos/02_model_checking.py
"""

import itlc

X, val = itlc.minimal_five()

print("=" * 64)
print("The five-point system")
print("=" * 64)
print("elements:", ", ".join(X.names))
print("order:    w below v;  z below y below x   (two components)")
print("map:      v->x, w->z, x->w, y->w, z->w")
print("valuation: p =", sorted(val["p"]), "  q =", sorted(val["q"]))

print()
print("Topology helpers (opens are the downward closed sets):")
print("  interior of {v,w,x} =", sorted(itlc.interior(X, {"v", "w", "x"})))
print("  closure  of {w}     =", sorted(itlc.closure(X, {"w"})))

print()
print("=" * 64)
print("Evaluating formulas")
print("=" * 64)
for text in ["p", "~p", "<>p", "[]<>p", "(X p -> X q) -> X(p -> q)"]:
    truth = itlc.evaluate(X, val, itlc.parse(text))
    print(f"  [[{text}]] = {sorted(truth)}")

interchange = itlc.parse("(X p -> X q) -> X(p -> q)")
print()
print("The interchange law fails exactly at v, because the map is not open:")
print("  v satisfies it?", "v" in itlc.evaluate(X, val, interchange))

print()
print("=" * 64)
print("Dynamical analysis")
print("=" * 64)
result = itlc.analyze(X)
print(f"  minimal:   {result.minimal}   (every orbit is dense)")
print(f"  recurrent: {result.recurrent}   (every principal open returns)")
print(f"  connected: {result.connected}  (two order components)")

print()
print("Validity under *every* open valuation:")
for text in ["p -> p", "E p -> <>p", "p | ~p"]:
    ok = itlc.is_valid_on_system(X, itlc.parse(text))
    print(f"  {text:12} {'valid' if ok else 'falsifiable'} on this system")
print("(the minimality law E p -> <>p holding everywhere is no accident;")
print(" see demos/05_dynamics.py)")
