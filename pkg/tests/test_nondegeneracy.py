import random
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings, strategies as st

from oscidecay.linalg import determinant
from oscidecay.nondegeneracy import (DiffOperator, NotAnAnnihilatorError, ProjectionSystem,
                                     annihilator_witness, cltt_l2_predicate, default_witness_pool,
                                     degeneracy_decompose, general_position)
from oscidecay.parser import parse_operator
from oscidecay.poly import MultiPoly
from oscidecay.scalar import QuadExtScalar

from helpers import P, V, random_degenerate, random_phase

D_XY = parse_operator("dx dy (dx - dy)", V)


def test_projection_system_validation():
    with pytest.raises(ValueError):
        ProjectionSystem(("x",), [[1]])
    with pytest.raises(ValueError):
        ProjectionSystem(V, [[0, 0, 0]])
    with pytest.raises(ValueError):
        ProjectionSystem(V, [[1, 0]])


def test_decompose_examples(lightcone):
    v = degeneracy_decompose(P("-2*x*y - y - 2*y*z"), lightcone.sys, 2)
    assert v.degenerate
    assert (v.reconstruct(lightcone.sys) - P("-2*x*y - y - 2*y*z")).is_zero()
    v = degeneracy_decompose(P("(y+z)^3"), lightcone.sys, 3)
    assert [str(p) for p in v.components] == ["t^3", "0", "0", "0", "0", "0"]
    v = degeneracy_decompose(P("x^3"), lightcone.sys, 3)
    assert not v.degenerate and v.distance_sq > 0


def test_five_square_identity(lightcone):
    v = degeneracy_decompose(P("4*x*y + 4*y*z"), lightcone.sys, 2)
    assert [str(p) for p in v.components] == ["0", "-2*t^2", "-t^2", "-t^2", "t^2", "t^2"]
    assert v.reconstruct(lightcone.sys) == P("4*x*y + 4*y*z")


def test_constant_absorbed_into_first_component(lightcone):
    v = degeneracy_decompose(P("7 + (x+z)^2"), lightcone.sys, 2)
    assert v.components[0].constant_term() == 7
    assert v.reconstruct(lightcone.sys) == P("7 + (x+z)^2")


def test_degree_bound_below_degree(lightcone):
    with pytest.raises(ValueError):
        degeneracy_decompose(P("x^3"), lightcone.sys, 2)


def test_general_position_examples(lightcone):
    assert general_position(lightcone.sys).holds
    triples = list(combinations(lightcone.sys.vectors, 3))
    assert len(triples) == 20 and all(determinant(t) != 0 for t in triples)
    bad = general_position(ProjectionSystem(V, [[1, 0, 0], [2, 0, 0], [0, 1, 0]]))
    assert not bad.holds and bad.failing_subset == (1, 2)
    assert general_position(ProjectionSystem(("x", "y"), [[1, 0], [0, 1], [1, 1]])).holds


def test_general_position_invariant_under_rescaling(lightcone):
    rng = random.Random(5)
    for _ in range(10):
        vs = [[c * QuadExtScalar(rng.choice([-3, -1, 2, 5]), rng.randint(-1, 1)) for c in v]
              for v in lightcone.sys.vectors]
        assert general_position(ProjectionSystem(V, vs)).holds


def test_witness_examples(lightcone):
    xy = ProjectionSystem(V, [[1, 0, 0], [0, 1, 0], [1, 1, 0]])
    w = annihilator_witness(P("x^2*y + 2*x*y*z"), xy, [D_XY])
    assert w is not None and w.image == MultiPoly.constant(V, 2)
    assert annihilator_witness(P("x^3"), xy, [D_XY]) is None

    Vz = V + ("zeta",)
    diff = P("x^2*y^2 - (x+zeta)^2*y^2", Vz)
    D = parse_operator("(dy + dz) dy (dx - dy)", V)
    w = annihilator_witness(diff, lightcone.sys.without(1), [D])
    assert w is not None and w.image == P("-4*zeta", Vz)


def test_witness_rejects_non_annihilators(lightcone):
    # d/dx kills only the factors with zero x-component
    with pytest.raises(NotAnAnnihilatorError):
        annihilator_witness(P("x^3"), lightcone.sys, [parse_operator("dx", V)])
    assert D_XY.annihilates(lightcone.sys)


def test_operator_text_and_kills():
    assert str(D_XY) == "dx dy (dx - dy)"
    assert D_XY.kills([0, 1, 0]) and D_XY.kills([1, 1, 5]) and not D_XY.kills([1, 2, 0])
    with pytest.raises(ValueError):
        DiffOperator(V, [[0, 0, 0]])


def test_default_pool_annihilates(lightcone, flex1):
    for sys in (lightcone.sys, flex1.sys):
        pool = default_witness_pool(sys)
        assert 0 < len(pool) <= 512
        assert all(D.annihilates(sys) for D in pool)


def test_l2_predicate_examples(lightcone):
    r = cltt_l2_predicate(P("x^3"), lightcone.sys, 3)
    assert not r.accepted and r.reason == "n < 2m fails: 6 ≮ 6"
    XY = ("x", "y")
    planar = ProjectionSystem(XY, [[1, 0], [0, 1], [1, 1]])
    assert cltt_l2_predicate(P("x^2*y", XY), planar, 3).accepted
    r = cltt_l2_predicate(P("x*y", XY), planar, 2)
    assert not r.accepted and r.degeneracy.degenerate
    assert r.degeneracy.reconstruct(planar) == P("x*y", XY)


def test_l2_predicate_invariant_under_permutation():
    XY = ("x", "y")
    vecs = [[1, 0], [0, 1], [1, 1]]
    for text in ["x^2*y", "x*y", "x^3 + y^2*x", "x^2"]:
        results = {cltt_l2_predicate(P(text, XY), ProjectionSystem(XY, [vecs[i] for i in perm]), 3).accepted
                   for perm in permutations(range(3))}
        assert len(results) == 1


def test_decomposition_reconstruction_property(lightcone):
    rng = random.Random(11)
    for _ in range(40):
        p = random_degenerate(rng, lightcone.sys, 4)
        v = degeneracy_decompose(p, lightcone.sys, 4)
        assert v.degenerate
        assert (p - v.reconstruct(lightcone.sys)).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_witness_soundness(seed):
    from oscidecay.problem import load_preset

    sys = load_preset("lightcone6").functional.sys
    rng = random.Random(seed)
    p = random_phase(rng, V, 3, rng.randint(1, 4))
    w = annihilator_witness(p, sys, default_witness_pool(sys)[:64])
    if w is not None:
        assert not degeneracy_decompose(p, sys, 3).degenerate
