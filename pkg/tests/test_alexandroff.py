import random

import pytest

import itlc
from itlc.alexandroff import (Analysis, analyze, closure, enumerate_posets,
                              enumerate_systems, evaluate, find_countermodel,
                              interior, is_valid_on_system, open_masks,
                              random_system, system, system_from_json,
                              system_to_json)
from itlc.formula import parse


def _random_valuation(rng, X, atoms):
    opens = open_masks(X)
    return {a: X.names_of(rng.choice(opens)) for a in atoms}


# ---------------------------------------------------------------------------
# Structures and invariants

def test_antisymmetry_violation_names_pair():
    with pytest.raises(itlc.SchemaError) as err:
        system(["a", "b"], [("a", "b"), ("b", "a")], {"a": "a", "b": "b"})
    assert "antisymmetry" in str(err.value)
    assert "a" in str(err.value) and "b" in str(err.value)


def test_transitive_closure_applied():
    X = system(["a", "b", "c"], [("a", "b"), ("b", "c")], {n: n for n in "abc"})
    assert X.poset.leq(0, 2)


def test_non_monotone_map_rejected():
    with pytest.raises(itlc.SchemaError) as err:
        system(["a", "b"], [("a", "b")], {"a": "b", "b": "a"})
    assert "monotone" in str(err.value)


def test_valuation_must_be_open():
    X = system(["a", "b"], [("a", "b")], {"a": "a", "b": "b"})
    with pytest.raises(itlc.SchemaError):
        evaluate(X, {"p": {"b"}}, parse("p"))


# ---------------------------------------------------------------------------
# Topology

def test_interior_whole_and_empty(fixture_system):
    X, _ = fixture_system
    everything = set(X.names)
    assert interior(X, everything) == frozenset(everything)
    assert interior(X, set()) == frozenset()
    assert closure(X, set()) == frozenset()


def test_interior_fixture_example(fixture_system):
    X, _ = fixture_system
    assert interior(X, {"v", "w", "x"}) == frozenset({"v", "w"})


def test_closure_fixture_example(fixture_system):
    X, _ = fixture_system
    assert closure(X, {"w"}) == frozenset({"v", "w"})


def test_closure_is_extensive(fixture_system):
    X, _ = fixture_system
    rng = random.Random(17)
    for _ in range(100):
        members = {n for n in X.names if rng.random() < 0.5}
        assert closure(X, members) >= frozenset(members)


# ---------------------------------------------------------------------------
# Evaluation

def test_fixture_interchange_fails_at_v(fixture_system):
    X, val = fixture_system
    truth = evaluate(X, val, parse("(X p -> X q) -> X(p -> q)"))
    assert "v" not in truth
    assert truth == frozenset({"w", "x", "y", "z"})


def test_fixture_eventually_everywhere(fixture_system):
    X, val = fixture_system
    assert evaluate(X, val, parse("<>p")) == frozenset(X.names)


def test_two_point_universal_example():
    X = system(["e0", "e1"], [("e0", "e1")], {"e0": "e0", "e1": "e1"})
    whole = {"p": frozenset({"e0", "e1"})}
    bottom_only = {"p": frozenset({"e0"})}
    assert "e0" in evaluate(X, whole, parse("A p"))
    assert "e0" not in evaluate(X, bottom_only, parse("A p"))
    # the existential fragment cannot see the difference at e0
    for text in ("p", "<>p", "[]p", "E p", "~p", "p & p", "X p"):
        a = "e0" in evaluate(X, whole, parse(text))
        b = "e0" in evaluate(X, bottom_only, parse(text))
        assert a == b, text


def test_missing_atom_reported():
    X = system(["a"], [], {"a": "a"})
    with pytest.raises(KeyError):
        evaluate(X, {}, parse("p"))


def test_truth_sets_always_open():
    rng = random.Random(29)
    for seed in range(60):
        X = random_system(rng.randrange(1, 6), seed)
        val = _random_valuation(rng, X, ("p", "q"))
        f = itlc.random_formula(rng, depth=3)
        mask = X.mask_of(evaluate(X, val, f))
        assert interior(X, X.names_of(mask)) == X.names_of(mask)


# ---------------------------------------------------------------------------
# Validity search

def test_identity_implication_always_valid(fixture_system):
    X, _ = fixture_system
    assert is_valid_on_system(X, parse("p -> p"))


def test_minimality_formula_on_fixture(fixture_system):
    X, _ = fixture_system
    assert is_valid_on_system(X, parse("E p -> <>p"))


def test_minimality_formula_fails_on_antichain():
    X = system(["a", "b"], [], {"a": "a", "b": "b"})
    assert not is_valid_on_system(X, parse("E p -> <>p"))


def test_validity_cap():
    X = system(["a", "b"], [], {"a": "a", "b": "b"})
    with pytest.raises(itlc.CapExceeded):
        is_valid_on_system(X, parse("p & q & r -> p"), itlc.Caps(max_valuations=3))


def test_countermodel_examples():
    assert find_countermodel(parse("p -> p"), 3) is None
    found = find_countermodel(parse("X p -> p"), 2)
    assert found is not None and len(found.system) <= 2
    truth = evaluate(found.system, found.valuation, parse("X p -> p"))
    assert found.point not in truth


def test_countermodel_cap_distinct_from_none():
    with pytest.raises(itlc.CapExceeded):
        find_countermodel(parse("p -> p"), 3, itlc.Caps(max_systems=5))


# ---------------------------------------------------------------------------
# Dynamical properties

def test_analyze_singleton():
    X = system(["a"], [], {"a": "a"})
    assert analyze(X) == Analysis(minimal=True, recurrent=True, connected=True)


def test_analyze_fixture(fixture_system):
    X, _ = fixture_system
    assert analyze(X) == Analysis(minimal=True, recurrent=True, connected=False)


def test_analyze_two_chain_identity():
    X = system(["a", "b"], [("a", "b")], {"a": "a", "b": "b"})
    assert analyze(X) == Analysis(minimal=False, recurrent=True, connected=True)


# ---------------------------------------------------------------------------
# Generation

def test_random_system_deterministic():
    for n in (1, 3, 6):
        assert random_system(n, seed=42) == random_system(n, seed=42)


def test_random_system_single_point_forced():
    X = random_system(1, seed=5)
    assert len(X) == 1 and X.f == (0,)


def test_random_system_invariants_hold():
    # constructors validate the poset and monotonicity, so surviving
    # construction is the check
    for seed in range(1000):
        X = random_system(6, seed)
        assert len(X) == 6


def test_enumerate_systems_counts():
    assert len(enumerate_systems(1)) == 1
    assert len(enumerate_systems(2)) == 10
    assert len(enumerate_posets(3)) == 19


def test_json_round_trip(tmp_path, fixture_system):
    X, val = fixture_system
    data = system_to_json(X, val)
    Y, val2 = system_from_json(data)
    assert Y == X and val2 == val
    assert system_to_json(Y, val2) == data
