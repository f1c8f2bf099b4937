from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oscidecay.parser import PolyParseError, parse_polynomial, parse_scalar
from oscidecay.poly import (MultiPoly, directional_derivative, expand_in, reassemble,
                            shift_substitute)
from oscidecay.scalar import QuadExtScalar

V = ("x", "y", "z")
R2 = QuadExtScalar.sqrt(2)


def P(text, variables=V):
    return parse_polynomial(text, variables, 2)


def terms(p):
    return dict(p.items())


# -- parser ----------------------------------------------------------------------

def test_parse_example_phase():
    assert terms(P("x^2*y + 2*x*y*z")) == {(2, 1, 0): 1, (1, 1, 1): 2}
    assert terms(P("x^3")) == {(3, 0, 0): 1}


def test_parse_expands_light_cone_square():
    x, y, z = (MultiPoly.variable(V, v) for v in V)
    form = x + y + z.scale(R2)
    oracle = form * form
    got = P("(x+y+sqrt(2)*z)^2")
    assert got == oracle
    assert terms(got) == {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): 2, (1, 1, 0): 2,
                          (1, 0, 1): 2 * R2, (0, 1, 1): 2 * R2}


def test_precedence():
    assert P("-x^2") == -P("x^2")
    assert P("2*x^2") == P("x^2").scale(2)
    assert P("x - y - z") == P("x") - P("y") - P("z")
    assert P("x**2") == P("x^2")
    assert P("1/2*x") == P("x").scale(Fraction(1, 2))
    assert P("x/2") == P("x").scale(Fraction(1, 2))


def test_parse_scalars():
    assert parse_scalar("-1/3") == QuadExtScalar(Fraction(-1, 3))
    assert parse_scalar("2*sqrt(2)") == 2 * R2
    assert parse_scalar("sqrt(8)") == 2 * R2
    assert parse_scalar("-sqrt(2)") == -R2


@pytest.mark.parametrize("text, column", [
    ("x + q", 5),
    ("x +* y", 4),
    ("(x + y", 7),
    ("x^y", 3),
    ("x $ y", 3),
])
def test_parse_errors_carry_position(text, column):
    with pytest.raises(PolyParseError) as info:
        P(text)
    assert info.value.position + 1 == column


def test_mixed_radicands_rejected():
    with pytest.raises(PolyParseError):
        parse_polynomial("sqrt(2)*x + sqrt(3)*y", V)


small = st.integers(-3, 3)
monos = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
coeffs = st.builds(lambda a, b: QuadExtScalar(a, b), small, small)
polys = st.dictionaries(monos, coeffs, max_size=6).map(
    lambda d: MultiPoly(V, {k: v for k, v in d.items() if v}))


@settings(max_examples=200, deadline=None)
@given(polys)
def test_print_parse_roundtrip(p):
    assert P(str(p)) == p


# -- derivatives -------------------------------------------------------------------

def test_derivative_examples():
    p = P("x^2*y + 2*x*y*z")
    for u in [(1, 0, 0), (0, 1, 0), (1, -1, 0)]:
        p = directional_derivative(p, u)
    assert p == MultiPoly.constant(V, 2)
    assert directional_derivative(P("(x+y)^3"), (1, -1, 0)).is_zero()
    x3 = P("x^3")
    box = x3.partial("x").partial("x") + x3.partial("y").partial("y") - x3.partial("z").partial("z")
    assert box == P("6*x")


def test_derivative_dimension_mismatch():
    with pytest.raises(ValueError):
        directional_derivative(P("x"), (1, 0))


@settings(max_examples=100, deadline=None)
@given(polys, polys, st.tuples(small, small, small))
def test_product_rule(p, q, u):
    d = lambda f: directional_derivative(f, u)
    assert d(p * q) == p * d(q) + q * d(p)


@settings(max_examples=100, deadline=None)
@given(polys, st.tuples(small, small, small))
def test_derivative_drops_degree_by_one(p, u):
    dp = directional_derivative(p, u)
    if not dp.is_zero():
        assert dp.degree() <= p.degree() - 1


# -- shift substitution ------------------------------------------------------------------

def test_shift_examples():
    W = V + ("zeta",)
    assert shift_substitute(P("x^2*y + 2*x*y*z"), "x", "zeta") == P("-2*zeta*x*y - zeta^2*y - 2*zeta*y*z", W)
    assert shift_substitute(P("x^3"), "x", "zeta") == P("-3*zeta*x^2 - 3*zeta^2*x - zeta^3", W)
    assert shift_substitute(P("y^2"), "x", "zeta").is_zero()


def test_shift_collision():
    with pytest.raises(ValueError):
        shift_substitute(P("x"), "x", "y")


@settings(max_examples=100, deadline=None)
@given(polys)
def test_shift_vanishes_at_zero(p):
    s = shift_substitute(p, "x", "zeta")
    assert s.specialize({"zeta": 0}).is_zero()


# -- slicing -------------------------------------------------------------------------------

def test_expand_in_examples():
    parts = expand_in(P("x^2*y + 2*x*y*z"), ["z"])
    assert parts == {(0,): P("x^2*y", ("x", "y")), (1,): P("2*x*y", ("x", "y"))}
    assert expand_in(P("x^3"), ["z"]) == {(0,): P("x^3", ("x", "y"))}
    assert expand_in(P("x^2*y^2"), ["z"]) == {(0,): P("x^2*y^2", ("x", "y"))}


@settings(max_examples=100, deadline=None)
@given(polys, st.sampled_from([["z"], ["x"], ["x", "z"], ["y", "z"]]))
def test_expand_in_roundtrip(p, frozen):
    assert reassemble(expand_in(p, frozen), frozen, V) == p
