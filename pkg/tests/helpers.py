"""Shared builders for the test-suite."""

import random
from fractions import Fraction

from oscidecay.nondegeneracy import ProjectionSystem
from oscidecay.parser import parse_polynomial
from oscidecay.poly import MultiPoly, monomial_basis
from oscidecay.scalar import QuadExtScalar

V = ("x", "y", "z")


def P(text, variables=V):
    return parse_polynomial(text, variables, 2)


def random_scalar(rng, irrational=True):
    a = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    b = Fraction(rng.randint(-2, 2), rng.randint(1, 2)) if irrational and rng.random() < 0.3 else 0
    return QuadExtScalar(a, b)


def random_phase(rng, variables=V, max_degree=3, terms=4, irrational=False):
    basis = [e for e in monomial_basis(len(variables), max_degree) if sum(e) >= 1]
    chosen = rng.sample(basis, min(terms, len(basis)))
    return MultiPoly(variables, {e: random_scalar(rng, irrational) or QuadExtScalar(1) for e in chosen})


def random_degenerate(rng, sys: ProjectionSystem, max_degree=4):
    """Sum of random univariate polynomials of the projections."""
    total = MultiPoly.zero(sys.variables)
    for j in range(1, sys.n + 1):
        lf = sys.form(j)
        for k in range(0, rng.randint(0, max_degree) + 1):
            c = random_scalar(rng)
            if c:
                total = total + (lf ** k).scale(c)
    return total


def swap_xy(p: MultiPoly) -> MultiPoly:
    i, j = p.vars.index("x"), p.vars.index("y")

    def sw(e):
        e = list(e)
        e[i], e[j] = e[j], e[i]
        return tuple(e)

    return MultiPoly(p.vars, {sw(e): c for e, c in p.items()})


def swap_sys(sys: ProjectionSystem) -> ProjectionSystem:
    i, j = sys.variables.index("x"), sys.variables.index("y")
    out = []
    for v in sys.vectors:
        v = list(v)
        v[i], v[j] = v[j], v[i]
        out.append(v)
    return ProjectionSystem(sys.variables, out)


__all__ = ["V", "P", "random", "random_scalar", "random_phase", "random_degenerate", "swap_xy", "swap_sys"]
