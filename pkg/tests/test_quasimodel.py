import copy

import pytest

import itlc
from itlc.formula import parse
from itlc.labels import subformula_closure, type_set
from itlc.moments import enumerate_irreducibles, moment
from itlc.quasimodel import (Lasso, Quasimodel, build_realizing_path,
                             check_quasimodel, complete_path_below, decide,
                             extract_quasimodel, falsified_members,
                             prune_profile, verify_certificate)


# ---------------------------------------------------------------------------
# Profile pruning

def test_prune_next_context_keeps_everything():
    sigma = subformula_closure(parse("X p"))
    store = enumerate_irreducibles(sigma)
    q = prune_profile(store, frozenset())
    assert set(q.worlds) == set(store.moments)
    assert check_quasimodel(q)


def test_prune_removes_unrealizable_eventuality():
    sigma = subformula_closure(parse("<>#"))
    store = enumerate_irreducibles(sigma)
    q = prune_profile(store, frozenset())
    ev_index = sigma.index[parse("<>#")]
    assert all(not m.label >> ev_index & 1 for m in q.worlds)
    assert len(q.worlds) == 1  # just the empty-labelled point


def _flagship_store(flagship_sigma):
    viable = itlc.viable_types(flagship_sigma, flagship_sigma.forall_mask)
    return enumerate_irreducibles(flagship_sigma, allowed_labels=viable)


def test_prune_flagship_profile(flagship, flagship_sigma, worked_moments):
    mu, mv, mw = worked_moments
    store = _flagship_store(flagship_sigma)
    q = prune_profile(store, frozenset({parse("A(~p | <>p)")}))
    for m in (mu, mv, mw):
        assert m in q.worlds
    target = flagship_sigma.index[flagship]
    assert any(not m.label >> target & 1 for m in q.worlds)
    assert check_quasimodel(q)


def test_prune_order_independent(flagship_sigma):
    store = _flagship_store(flagship_sigma)
    profile = frozenset({parse("A(~p | <>p)")})
    forward = prune_profile(store, profile)
    backward = prune_profile(store, profile, order=list(reversed(store.moments)))
    assert forward.worlds == backward.worlds
    assert forward.s_edges == backward.s_edges


def test_prune_empty_result_is_allowed():
    sigma = subformula_closure(parse("A<>p"))
    viable = itlc.viable_types(sigma, sigma.forall_mask)
    store = enumerate_irreducibles(sigma, allowed_labels=viable)
    assert store.complete
    q = prune_profile(store, frozenset({parse("A<>p")}))
    # empty is a legitimate outcome; whatever survives honors the profile
    for m in q.worlds:
        assert all(itlc.labels.profile_compatible(sigma, q.profile, l)
                   for l in m.node_labels())


# ---------------------------------------------------------------------------
# Structural checking

def test_golden_structure_passes(golden_quasimodel, flagship, flagship_sigma,
                                 worked_moments):
    q, idx = golden_quasimodel
    mu, _, _ = worked_moments
    assert check_quasimodel(q)
    assert q.root_lacks(idx[mu], flagship_sigma.index[flagship])


def test_golden_structure_without_realizer_fails(flagship_sigma, worked_moments):
    mu, mv, mw = worked_moments
    worlds = tuple(sorted([mu, mv], key=lambda m: m.key))
    idx = {m: i for i, m in enumerate(worlds)}
    edges = frozenset({(idx[mu], idx[mu]), (idx[mv], idx[mv])})
    q = Quasimodel(flagship_sigma, worlds, edges, flagship_sigma.forall_mask)
    outcome = check_quasimodel(q)
    assert not outcome
    assert "unrealized" in outcome.reason


def test_defective_single_world_fails_revocation(flagship_sigma, worked_labels):
    lu, _, _ = worked_labels
    bad = moment(flagship_sigma, lu.mask, (), validate=False)
    q = Quasimodel(flagship_sigma, (bad,), frozenset({(0, 0)}),
                   flagship_sigma.forall_mask)
    outcome = check_quasimodel(q)
    assert not outcome
    assert "not a moment" in outcome.reason


def test_missing_submoment_fails(worked_moments, flagship_sigma):
    mu, _, mw = worked_moments
    worlds = tuple(sorted([mu, mw], key=lambda m: m.key))
    idx = {m: i for i, m in enumerate(worlds)}
    edges = frozenset({(idx[mu], idx[mu]), (idx[mw], idx[mw])})
    q = Quasimodel(flagship_sigma, worlds, edges, flagship_sigma.forall_mask)
    outcome = check_quasimodel(q)
    assert not outcome
    assert "submoment" in outcome.reason


def test_insensible_edge_fails(flagship_sigma, worked_moments):
    mu, mv, mw = worked_moments
    worlds = tuple(sorted([mu, mv, mw], key=lambda m: m.key))
    idx = {m: i for i, m in enumerate(worlds)}
    edges = frozenset({(idx[mu], idx[mv]), (idx[mv], idx[mv]), (idx[mv], idx[mw]),
                       (idx[mw], idx[mw])})
    q = Quasimodel(flagship_sigma, worlds, edges, flagship_sigma.forall_mask)
    outcome = check_quasimodel(q)
    assert not outcome
    assert "sensible" in outcome.reason


# ---------------------------------------------------------------------------
# Realizing paths

def test_lasso_no_eventualities(golden_quasimodel, worked_moments):
    q, idx = golden_quasimodel
    mu, _, _ = worked_moments
    lasso = build_realizing_path(q, idx[mu])
    assert lasso == Lasso((), (idx[mu],))


def test_lasso_realizes_pending(golden_quasimodel, worked_moments):
    q, idx = golden_quasimodel
    _, mv, mw = worked_moments
    lasso = build_realizing_path(q, idx[mv])
    seq = lasso.prefix + lasso.loop
    assert seq[0] == idx[mv]
    assert idx[mw] in seq
    # spot-check the realization rule on the loop
    p_index = q.sigma.index[parse("p")]
    ev_index = q.sigma.index[parse("<>p")]
    for world in lasso.loop:
        if q.worlds[world].label >> ev_index & 1:
            assert any(q.worlds[j].label >> p_index & 1 for j in lasso.loop)


def test_lassos_for_all_worlds(golden_quasimodel):
    q, _ = golden_quasimodel
    for i in range(len(q.worlds)):
        lasso = build_realizing_path(q, i)
        assert lasso.loop


def test_complete_path_below(golden_quasimodel, worked_moments):
    q, idx = golden_quasimodel
    mu, mv, _ = worked_moments
    path = [idx[mu], idx[mu]]
    assert complete_path_below(q, path, idx[mu]) == path
    assert complete_path_below(q, path, idx[mv]) == [idx[mv], idx[mv]]
    assert complete_path_below(q, [idx[mu]], idx[mv]) == [idx[mv]]


def test_complete_path_below_rejects_bad_start(golden_quasimodel, worked_moments):
    q, idx = golden_quasimodel
    mu, _, mw = worked_moments
    with pytest.raises(ValueError):
        complete_path_below(q, [idx[mw]], idx[mu])


# ---------------------------------------------------------------------------
# Decide and certificates

def test_decide_trivial_validity():
    assert decide(parse("p -> p")).kind == "VALID"


def test_decide_unfolding_validity():
    verdict = decide(parse("<>p <-> (p | X <> p)"))
    assert verdict.kind == "VALID" and verdict.complete


def test_decide_flagship(flagship):
    verdict = decide(flagship)
    assert verdict.kind == "FALSIFIABLE"
    assert verify_certificate(verdict.certificate, flagship)


def test_decide_next_regression():
    verdict = decide(parse("X p -> p"))
    assert verdict.kind == "FALSIFIABLE"
    assert verify_certificate(verdict.certificate, parse("X p -> p"))


def test_certificate_round_trip(tmp_path, flagship):
    verdict = decide(flagship)
    path = tmp_path / "cert.json"
    itlc.save_certificate(verdict.certificate, path)
    loaded = itlc.load_certificate(path, flagship)
    assert loaded == verdict.certificate
    assert loaded.to_json_text() == verdict.certificate.to_json_text()


def test_verify_rejects_tampered_witness(flagship, flagship_sigma):
    cert = decide(flagship).certificate
    data = cert.to_json_dict()
    assert verify_certificate(data, flagship)
    tampered = copy.deepcopy(data)
    target_idx = flagship_sigma.index[flagship]
    witness_entry = next(w for w in tampered["worlds"]
                         if w["id"] == tampered["witness"])
    _inject_label(witness_entry["moment"], target_idx)
    outcome = verify_certificate(tampered, flagship)
    assert not outcome


def _inject_label(moment_json, index):
    if index not in moment_json["label"]:
        moment_json["label"] = sorted(moment_json["label"] + [index])
    for child in moment_json["children"]:
        _inject_label(child, index)


def test_verify_rejects_broken_seriality(flagship):
    cert = decide(flagship).certificate
    data = copy.deepcopy(cert.to_json_dict())
    victim = data["witness"]
    data["s_edges"] = [e for e in data["s_edges"] if e[0] != victim]
    outcome = verify_certificate(data, flagship)
    assert not outcome


def test_verify_rejects_wrong_target(flagship):
    cert = decide(flagship).certificate
    assert not verify_certificate(cert.to_json_dict(), parse("p -> p"))


def test_decide_resource_limit_never_claims_valid():
    verdict = decide(parse("X p -> p"), itlc.Caps(max_moments=2))
    assert verdict.kind in {"FALSIFIABLE", "RESOURCE_LIMIT"}
    if verdict.kind == "FALSIFIABLE":
        assert verify_certificate(verdict.certificate, parse("X p -> p"))


def test_decide_exhaustion_backstop(monkeypatch):
    # with the label-viability shortcut disabled, verdicts must not change:
    # validity then rests on exhausting the (tiny) moment space, and
    # falsifiability on the layered search
    monkeypatch.setattr(
        itlc.quasimodel, "viable_types",
        lambda sigma, profile: frozenset(
            t for t in sigma.type_masks()
            if itlc.labels.profile_compatible(sigma, profile, t)))
    verdict = decide(parse("p -> p"))
    assert verdict.kind == "VALID" and verdict.complete
    assert any("complete enumeration" in o for o in verdict.profile_outcomes)

    flagship = parse("A(~p | <>p) -> (~<>p | <>p)")
    verdict = decide(flagship, itlc.Caps(timeout=60))
    assert verdict.kind == "FALSIFIABLE"
    assert verify_certificate(verdict.certificate, flagship)


# ---------------------------------------------------------------------------
# Extraction from finite systems

def test_extract_one_point_identity():
    X = itlc.system(["a"], [], {"a": "a"})
    sigma = subformula_closure(parse("p"))
    q = extract_quasimodel(X, {"p": frozenset({"a"})}, sigma)
    assert len(q.worlds) == 1
    assert q.worlds[0].label == type_set(sigma, [parse("p")]).mask


def test_extract_next_countermodel_witness():
    f = parse("X p -> p")
    found = itlc.find_countermodel(f, 2)
    assert found is not None
    sigma = subformula_closure(f)
    q = extract_quasimodel(found.system, found.valuation, sigma)
    assert check_quasimodel(q)
    assert any(not m.label >> sigma.index[f] & 1 for m in q.worlds)


def test_extract_fixture_falsifies_interchange(fixture_system):
    X, val = fixture_system
    f = parse("(X p -> X q) -> X(p -> q)")
    sigma = subformula_closure(f)
    q = extract_quasimodel(X, val, sigma)
    assert check_quasimodel(q)
    assert any(not m.label >> sigma.index[f] & 1 for m in q.worlds)


def test_extract_agrees_with_model_checker(fixture_system):
    X, val = fixture_system
    f = parse("(X p -> X q) -> X(p -> q)")
    sigma = subformula_closure(f)
    q = extract_quasimodel(X, val, sigma)
    full = frozenset(X.names)
    model_falsified = {g for g in sigma.formulas
                       if itlc.evaluate(X, val, g) != full}
    assert set(falsified_members(q)) == model_falsified


def test_soundness_hook():
    # a finite countermodel means decide can never answer VALID
    for text in ("X p -> p", "<>p -> p", "E p -> <>p", "p -> X p"):
        f = parse(text)
        assert itlc.find_countermodel(f, 3) is not None
        verdict = decide(f)
        assert verdict.kind == "FALSIFIABLE"
        assert verify_certificate(verdict.certificate, f)


def test_extract_agreement_on_random_systems():
    import random

    from itlc.alexandroff import open_masks

    rng = random.Random(77)
    checked = 0
    while checked < 25:
        X = itlc.random_system(rng.randrange(1, 5), rng.randrange(10**6))
        opens = open_masks(X)
        val = {a: X.names_of(rng.choice(opens)) for a in ("p", "q")}
        f = itlc.eliminate_exists(
            itlc.random_formula(rng, depth=2, modalities=itlc.DIAMOND_FRAGMENT))
        sigma = subformula_closure(f)
        if len(sigma) > 9:
            continue
        q = extract_quasimodel(X, val, sigma, itlc.Caps(timeout=30))
        assert check_quasimodel(q)
        full = frozenset(X.names)
        model_falsified = {g for g in sigma.formulas
                           if itlc.evaluate(X, val, g) != full}
        assert set(falsified_members(q)) == model_falsified
        checked += 1
