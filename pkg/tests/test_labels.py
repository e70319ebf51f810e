import itertools
import random

import pytest

import itlc
from itlc.formula import And, Atom, BOT, Eventually, Forall, Implies, Next, Or, parse
from itlc.labels import (SigmaContext, TypeSet, defects, enumerate_types,
                         sensible_pair, subformula_closure, type_set)

p, q = Atom("p"), Atom("q")


def _is_type_reference(sigma, members):
    """Oracle written straight from the closure conditions."""
    if BOT in members:
        return False
    for f in sigma.formulas:
        if isinstance(f, And) and f in sigma.index:
            if (f in members) != (f.left in members and f.right in members):
                return False
        if isinstance(f, Or):
            if (f in members) != (f.left in members or f.right in members):
                return False
        if isinstance(f, Implies):
            if f in members and f.left in members and f.right not in members:
                return False
            if f.right in members and f not in members:
                return False
        if isinstance(f, Eventually):
            if f.body in members and f not in members:
                return False
    return True


def test_enumerate_types_atom_only():
    sigma = SigmaContext((p,))
    got = enumerate_types(sigma)
    assert [t.members() for t in got] == [(), (p,)]


def test_enumerate_types_eventually_oracle():
    sigma = subformula_closure(parse("<>p"))
    got = {t.members() for t in enumerate_types(sigma)}
    expected = set()
    for members in itertools.chain.from_iterable(
            itertools.combinations(sigma.formulas, k) for k in range(3)):
        if _is_type_reference(sigma, set(members)):
            expected.add(members)
    assert got == expected
    assert len(got) == 3
    assert (p,) not in got  # p without <>p breaks the unfolding condition


def test_worked_labels_are_enumerated(flagship_sigma, worked_labels):
    masks = {t.mask for t in enumerate_types(flagship_sigma)}
    for label in worked_labels:
        assert label.mask in masks


def test_enumerated_types_pass_reference_oracle():
    rng = random.Random(11)
    for _ in range(40):
        f = itlc.random_formula(rng, depth=3,
                                modalities=itlc.DIAMOND_FRAGMENT)
        sigma = subformula_closure(f)
        if len(sigma) > 10:
            continue
        for t in enumerate_types(sigma):
            assert _is_type_reference(sigma, set(t.members()))
        assert len(enumerate_types(sigma)) <= 2 ** len(sigma)


def test_defects_examples(worked_labels):
    sigma = subformula_closure(parse("p -> q"))
    empty = type_set(sigma, [])
    assert defects(empty) == (parse("p -> q"),)

    lu, lv, _ = worked_labels
    assert defects(lu) == (parse("~<>p"),)
    assert defects(lv) == ()


def test_defect_members_satisfy_definition():
    rng = random.Random(5)
    for _ in range(40):
        f = itlc.random_formula(rng, depth=3, modalities=itlc.DIAMOND_FRAGMENT)
        sigma = subformula_closure(f)
        if len(sigma) > 9:
            continue
        for t in enumerate_types(sigma):
            for d in defects(t):
                assert isinstance(d, Implies)
                assert d not in t and d.left not in t


def test_sensible_examples(worked_labels):
    lu, lv, lw = worked_labels
    assert sensible_pair(lv, lw)
    assert sensible_pair(lu, lu)
    assert not sensible_pair(lu, lv)

    sigma = subformula_closure(parse("X p"))
    with_next = type_set(sigma, [Next(p)])
    with_p = type_set(sigma, [p])
    empty = type_set(sigma, [])
    assert sensible_pair(with_next, with_p)
    assert not sensible_pair(with_next, empty)


def test_sensible_sigma_mismatch():
    a = type_set(SigmaContext((p,)), [p])
    b = type_set(SigmaContext((q,)), [q])
    with pytest.raises(itlc.SigmaMismatchError):
        sensible_pair(a, b)


def test_enumerated_types_recheck_implication_clause():
    sigma = subformula_closure(parse("(p -> q) & (q -> p)"))
    for t in enumerate_types(sigma):
        for f in sigma.formulas:
            if isinstance(f, Implies) and f in t and f.left in t:
                assert f.right in t


def test_eventuality_persists_across_sensible_chains():
    # if <>g holds without g now, the obligation transfers forward, and
    # onward again when still unrealized
    rng = random.Random(23)
    sigma = subformula_closure(parse("<>p & <>q"))
    types = enumerate_types(sigma)
    ev = [f for f in sigma.formulas if isinstance(f, Eventually)]
    for _ in range(300):
        a, b, c = (rng.choice(types) for _ in range(3))
        if not (sensible_pair(a, b) and sensible_pair(b, c)):
            continue
        for g in ev:
            if g in a and g.body not in a and g.body not in b:
                assert g in b
                if g.body not in b:
                    assert g in c or g.body in c


def test_sensible_pairs_agree_on_universals(flagship_sigma):
    types = enumerate_types(flagship_sigma)
    universals = [f for f in flagship_sigma.formulas if isinstance(f, Forall)]
    for a in types:
        for b in types:
            if sensible_pair(a, b):
                assert all((u in a) == (u in b) for u in universals)


def test_bottom_never_in_a_type(flagship_sigma):
    assert all(BOT not in t for t in enumerate_types(flagship_sigma))
    with pytest.raises(ValueError):
        TypeSet(flagship_sigma, 1 << flagship_sigma.bottom_index)


def test_type_serialization_indices(worked_labels):
    lu, _, _ = worked_labels
    assert lu.indices() == tuple(sorted(lu.indices()))
    rebuilt = TypeSet(lu.sigma, sum(1 << i for i in lu.indices()))
    assert rebuilt == lu
