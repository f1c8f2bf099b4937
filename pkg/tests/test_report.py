import pytest
from hypothesis import given, settings, strategies as st

from oscidecay.parser import parse_operator
from oscidecay.poly import MultiPoly
from oscidecay.problem import PRESETS, ProblemError, load_preset, parse_problem
from oscidecay.report import (identity_text, operator_from_json, operator_to_json, poly_from_json,
                              poly_to_json, scalar_from_json, scalar_to_json)
from oscidecay.scalar import QuadExtScalar

from helpers import P, V

fr = st.fractions(min_value=-100, max_value=100, max_denominator=50)


@settings(max_examples=200, deadline=None)
@given(fr, fr, st.sampled_from([2, 3, 5]))
def test_scalar_roundtrip(a, b, m):
    x = QuadExtScalar(a, b, m)
    d = scalar_to_json(x)
    assert set(d) == {"rat", "irr", "m"} and isinstance(d["rat"], str)
    assert scalar_from_json(d) == x


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)),
                       st.builds(QuadExtScalar, fr, fr), max_size=5))
def test_poly_roundtrip(terms):
    p = MultiPoly(V, {k: v for k, v in terms.items() if v})
    assert poly_from_json(poly_to_json(p)) == p


def test_operator_roundtrip():
    D = parse_operator("(sqrt(2)*dx - dz) dy (dx + dy)", V)
    assert operator_from_json(operator_to_json(D)) == D


def test_identity_text():
    lc = load_preset("lightcone6").functional
    forms = [lc.sys.form(j) for j in range(1, 7)]
    comps = [P(s, ("t",)) for s in ["0", "-2*t^2", "-t^2", "-t^2", "t^2", "t^2"]]
    assert identity_text(P("4*x*y + 4*y*z"), comps, forms) == (
        "4*x*y + 4*y*z = -2*(y - z)^2 - (x + z)^2 - (x - z)^2 + (x + y + sqrt(2)*z)^2 + (x + y - sqrt(2)*z)^2")


@pytest.mark.parametrize("name", PRESETS)
def test_presets_load(name):
    prob = load_preset(name)
    assert prob.functional.n == len(prob.functional.sys.vectors)
    if name == "planar3":
        assert prob.factor_specs is not None and len(prob.factor_specs) == 3


def test_preset_shapes():
    assert load_preset("flex1").functional.n == 9
    assert load_preset("flex2").functional.n == 8
    assert load_preset("lightcone6").radicand == 2


def test_problem_errors():
    with pytest.raises(ProblemError, match="missing key"):
        parse_problem('variables = ["x", "y"]\nphase = "x"\n')
    with pytest.raises(ProblemError, match="2 entries"):
        parse_problem('variables = ["x", "y"]\nphase = "x"\nfactors = [[1, 0, 0]]\n')
    with pytest.raises(ProblemError, match="exact fraction"):
        parse_problem('variables = ["x", "y"]\nphase = "x"\nfactors = [[0.5, 1]]\n')
    with pytest.raises(ProblemError, match="numerics lists"):
        parse_problem('variables = ["x", "y"]\nphase = "x"\nfactors = [[1, 0], [0, 1]]\n'
                      '[[numerics.factors]]\nkind = "gaussian"\n')
    with pytest.raises(ProblemError) as info:
        parse_problem('variables = ["x", "y"]\nphase = "x +"\nfactors = [[1, 0], [0, 1]]\n', "f.toml")
    assert info.value.line == 2 and info.value.source == "f.toml"
    with pytest.raises(ProblemError):
        load_preset("nope")


def test_phase_override_raises_degree_bound():
    prob = load_preset("lightcone6", phase="x^2*y^2")
    assert prob.functional.degree_bound == 4
