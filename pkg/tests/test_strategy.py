import dataclasses
import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from oscidecay.strategy import (ANNIHILATOR, CAUCHY_SCHWARZ, GROUPED, L2, LINF, Functional,
                                analyze_freezing, cauchy_schwarz_certificate, enumerate_strategies,
                                grouped_certificate, survey, validate_certificate)

from helpers import P, V, random_phase

W4 = ("x", "y", "z", "w")


def norms(text):
    return tuple(L2 if c == "2" else LINF for c in text.split(","))


def test_functional_validation(lightcone):
    with pytest.raises(ValueError):
        Functional(lightcone.sys, P("x^4"), 3)
    with pytest.raises(ValueError):
        Functional(lightcone.sys, P("x*w", W4))
    assert Functional(lightcone.sys, P("x^2")).degree_bound == 2


def test_lightcone_top_route_grouped(lightcone):
    certs = enumerate_strategies(lightcone)
    top = certs[0]
    assert top.route == GROUPED and top.frozen == ("z",)
    assert top.norms == norms("2,inf,2,inf,2,inf")
    assert top.norm_string() == "(2,∞,2,∞,2,∞)"
    a = top.evidence
    assert a.groups == ((1, 2), (3, 4), (5, 6))
    assert a.uniform.positive


def test_cubic_uses_cauchy_schwarz(lightcone):
    fn = lightcone.with_phase(P("x^3"))
    s = survey(fn)
    assert [c.label for c in s.certificates] == ["cauchy-schwarz(f1,x)", "cauchy-schwarz(f2,x)"]
    assert all(c.norms == norms("2,2,inf,inf,inf,inf") for c in s.certificates)
    grouped = [r for r in s.rejections if r.route == GROUPED]
    assert grouped and all(any("identically-zero" in x for x in r.reasons) for r in grouped)


def test_cauchy_schwarz_examples(lightcone):
    fn = lightcone.with_phase(P("x^3"))
    c = cauchy_schwarz_certificate(fn, 1, "x")
    assert c.route == CAUCHY_SCHWARZ and c.companion == 2
    assert c.evidence.difference.positive
    r = cauchy_schwarz_certificate(lightcone, 1, "x")
    assert not hasattr(r, "norms") and any("identically-zero" in x for x in r.reasons)
    c = cauchy_schwarz_certificate(lightcone.with_phase(P("x^2*y^2")), 1, "x")
    assert c.route == CAUCHY_SCHWARZ
    image = c.evidence.witness.image
    assert image.active_vars() == ("zeta",) and image.degree() == 1 and image.constant_term() == 0
    r = cauchy_schwarz_certificate(fn, 3, "x")
    assert r.reasons == ("f3 depends on x",)


def test_quartic_ranks_grouped_first(lightcone):
    certs = enumerate_strategies(lightcone.with_phase(P("x^2*y^2")))
    routes = [c.route for c in certs]
    assert routes[0] == GROUPED and certs[0].l2_count == 3
    assert CAUCHY_SCHWARZ in routes
    cs = next(c for c in certs if c.route == CAUCHY_SCHWARZ)
    assert cs.l2_count == 2


def test_flex1_freezing_table(flex1):
    a = analyze_freezing(flex1, ["z", "w"])
    assert a.accepted
    assert sorted(map(sorted, a.groups)) == [[1, 2], [3, 4, 7, 8, 9], [5, 6]]
    assert a.uniform.positive
    assert a.norms(9) == norms("2,inf,2,inf,2,inf,inf,inf,inf")
    assert analyze_freezing(flex1, ["z"]).reasons[0] == "count 6 ≮ 6"
    assert analyze_freezing(flex1, ["w"]).reasons[0] == "count 7 ≮ 6"
    for s in (["x"], ["y"]):
        assert any(r.startswith("uniformity") for r in analyze_freezing(flex1, s).reasons)
    accepted = [S for k in (1, 2) for S in combinations(W4, k) if analyze_freezing(flex1, S).accepted]
    assert accepted == [("z", "w")]


def test_freeze_limits(lightcone):
    with pytest.raises(ValueError):
        analyze_freezing(lightcone, ["y", "z"])
    with pytest.raises(ValueError):
        analyze_freezing(lightcone, ["q"])


def test_flex2_ranking(flex2):
    certs = enumerate_strategies(flex2)
    labels = [c.label for c in certs]
    z, zw = labels.index("grouped{z}"), labels.index("grouped{z,w}")
    assert z < zw
    assert certs[z].l2_count == 5 and certs[zw].l2_count == 3
    assert certs[0].label == "grouped{z}"


def test_annihilator_route_is_conditional(lightcone):
    c = next(c for c in enumerate_strategies(lightcone) if c.route == ANNIHILATOR)
    assert L2 not in c.norms
    assert c.operator.annihilates(lightcone.sys)
    assert not c.operator.apply(lightcone.phase).is_zero()


def test_validation_catches_tampering(lightcone):
    top = enumerate_strategies(lightcone)[0]
    assert validate_certificate(top, lightcone)
    tampered = dataclasses.replace(top, norms=norms("2,2,2,inf,2,inf"))
    v = validate_certificate(tampered, lightcone)
    assert not v and v.reason == "group norm rule"
    v = validate_certificate(top, lightcone.with_phase(P("x^3")))
    assert not v and v.reason == "uniformity identically-zero"
    cs = enumerate_strategies(lightcone.with_phase(P("x^3")))[0]
    bad = dataclasses.replace(cs, norms=norms("2,inf,2,inf,inf,inf"))
    assert validate_certificate(bad, lightcone.with_phase(P("x^3"))).reason == "cauchy-schwarz norm rule"


def test_grouped_rule_holds_for_all_fixture_certificates(lightcone, flex1, flex2):
    for fn in (lightcone, lightcone.with_phase(P("x^2*y^2")), flex1, flex2):
        for c in enumerate_strategies(fn):
            assert validate_certificate(c, fn), c.label
            if c.route == GROUPED:
                a = c.evidence
                for g in a.groups:
                    assert sum(c.norms[j - 1] == L2 for j in g) == 1
                assert all(c.norms[j - 1] == LINF for j in a.passthrough)


def test_determinism(lightcone):
    a = [(c.label, c.norms) for c in enumerate_strategies(lightcone)]
    b = [(c.label, c.norms) for c in enumerate_strategies(lightcone)]
    assert a == b


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([Fraction(2), Fraction(-3, 7)]))
def test_rescaling_invariance(seed, c):
    from oscidecay.problem import load_preset

    fn = load_preset("lightcone6").functional
    p = random_phase(random.Random(seed), V, 3, 3)
    a = [(x.label, x.norms) for x in enumerate_strategies(fn.with_phase(p))]
    b = [(x.label, x.norms) for x in enumerate_strategies(fn.with_phase(p.scale(c)))]
    assert a == b


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_random_quartic_certificates_validate(seed):
    from oscidecay.problem import load_preset

    fn = load_preset("lightcone6").functional
    p = random_phase(random.Random(seed), V, 4, 3)
    fn = Functional(fn.sys, p, 4)
    for c in enumerate_strategies(fn):
        assert validate_certificate(c, fn), c.label
