"""Formulas: parsing, printing, subformula contexts, fragments.

Run:  python demos/01_formulas_and_contexts.py
"""

import itlc

print("=" * 64)
print("Parsing and printing")
print("=" * 64)

for text in ["~p", "p & q -> r", "p <-> q", "X<>p", "A(~p | <>p) -> (~<>p | <>p)"]:
    f = itlc.parse(text)
    print(f"  {text!r:42} -> {f}")

print()
print("Negation is sugar for implication into falsum:")
print("  ~p ==", repr(itlc.parse("~p")))

print()
print("=" * 64)
print("Subformula contexts")
print("=" * 64)

phi = itlc.parse("A(~p | <>p) -> (~<>p | <>p)")
sigma = itlc.subformula_closure(phi)
print(f"The context of {phi} has {len(sigma)} members, indexed post-order:")
for i, g in enumerate(sigma.formulas):
    print(f"  [{i}] {g}")
print(f"It admits {len(sigma.type_masks())} types (membership sets closed")
print("under the conjunction/disjunction/implication/eventuality rules).")

print()
print("=" * 64)
print("Fragments and rewrites")
print("=" * 64)

print("modalities of phi:", sorted(m.name for m in itlc.fragment_of(phi)))
e = itlc.parse("E E p")
print(f"existentials rewrite away: {e}  ==>  {itlc.eliminate_exists(e)}")
print("the decidable fragment accepts phi:", itlc.in_diamond_fragment(phi))
print("but not []p:", itlc.in_diamond_fragment(itlc.parse("[]p")))

print()
print("Translation into the classical bimodal language ('*' is interior):")
for text in ["p", "<>[]p -> #", "p & q"]:
    print(f"  {text:14} ->  {itlc.godel_tarski(itlc.parse(text))}")
