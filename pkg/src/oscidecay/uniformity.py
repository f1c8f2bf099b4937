"""Nondegeneracy that holds uniformly in real parameters.

Every check here reduces to one question: does a finite family of
polynomials ``q_a(t)`` in the parameters have a common real zero in the
parameter domain?

Core lemma.  Let ``q_1..q_k`` be real polynomials in one variable ``t``, not
all identically zero, and let ``F(t) = max_a |q_a(t)|``.  If some ``q_a`` is
a nonzero constant, ``F`` is bounded below by it.  Otherwise some ``q_a`` is
nonconstant, so ``|q_a(t)| -> inf`` as ``|t| -> inf`` and ``F > 1`` outside
a compact set ``K``; on ``K`` (intersected with a closed domain) ``F`` is
continuous, so its minimum is positive exactly when the ``q_a`` have no
common zero there, i.e. when their gcd has no real root in the domain.
Hence ``inf F > 0`` over a closed domain iff the gcd has no root in it.
The sup over the unit ball of ``|sum_a q_a(t) x^a|`` is a norm on the
coefficient vector, equivalent to the max norm, so positivity transfers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .nondegeneracy import (DegeneracyVerdict, DiffOperator, ProjectionSystem,
                            degeneracy_decompose, pulled_back_span)
from .poly import MultiPoly, coefficient_vector, expand_in, shift_substitute
from .scalar import ZERO, QuadExtScalar, as_scalar
from .sturm import (Domain, OutsideRadius, RealLine, count_real_roots, gcd_univariate,
                    isolate_real_roots, to_coeffs)

POSITIVE = "positive"
VANISHES = "vanishes-at"
IDENTICALLY_ZERO = "identically-zero"
UNDECIDED = "undecided-multiparameter"

SHIFT_PARAM = "zeta"


@dataclass(frozen=True)
class UniformityVerdict:
    """Outcome of a uniform-positivity check.

    ``coefficients`` are the polynomials ``q_a`` in the parameters whose
    common real zeros decide the question; ``gcd`` is their monic gcd when a
    single parameter occurs.  For ``vanishes-at``, ``root`` holds an exact
    parameter value when one is known and ``root_interval`` an isolating
    rational interval otherwise.
    """

    status: str
    parameters: tuple[str, ...]
    coefficients: tuple[MultiPoly, ...] = ()
    gcd: MultiPoly | None = None
    domain: Domain = RealLine()
    root: QuadExtScalar | None = None
    root_interval: tuple[Fraction, Fraction] | None = None
    image: MultiPoly | None = None
    degeneracy: DegeneracyVerdict | None = None

    @property
    def positive(self) -> bool:
        return self.status == POSITIVE

    def describe(self) -> str:
        if self.status != VANISHES:
            return self.status
        name = self.parameters[0] if self.parameters else "t"
        if self.root is not None:
            return f"{VANISHES} {name} = {self.root}"
        lo, hi = self.root_interval
        return f"{VANISHES} {name} in [{lo}, {hi}]"


def decide_family(coeffs: Sequence[MultiPoly], params: Sequence[str],
                  domain: Domain = RealLine(), image: MultiPoly | None = None) -> UniformityVerdict:
    """Apply the core lemma to the family ``coeffs`` (polynomials in ``params``)."""
    params = tuple(params)
    nonzero = tuple(q for q in coeffs if not q.is_zero())
    if not nonzero:
        return UniformityVerdict(IDENTICALLY_ZERO, params, tuple(coeffs), domain=domain, image=image)
    if any(q.is_constant() for q in nonzero):
        return UniformityVerdict(POSITIVE, params, nonzero, domain=domain, image=image)
    active = {v for q in nonzero for v in q.active_vars()}
    used = [v for v in params if v in active] + sorted(active - set(params))
    if len(used) > 1:
        return UniformityVerdict(UNDECIDED, params, nonzero, domain=domain, image=image)
    g = gcd_univariate(nonzero)
    if g.is_constant() or count_real_roots(g, domain) == 0:
        return UniformityVerdict(POSITIVE, params, nonzero, g, domain, image=image)
    root, interval = _locate_root(g, domain)
    return UniformityVerdict(VANISHES, (used[0],) + tuple(p for p in params if p != used[0]),
                             nonzero, g, domain, root, interval, image=image)


def _locate_root(g: MultiPoly, domain: Domain):
    c = to_coeffs(g)
    if len(c) == 2:
        return -c[0] / c[1], None
    lo, hi = isolate_real_roots(g, domain)[0]
    if lo == hi:
        return as_scalar(lo), None
    return None, (lo, hi)


# -- operations --------------------------------------------------------------

def hyp_check(P: MultiPoly, frozen: Sequence[str], D: DiffOperator) -> UniformityVerdict:
    """Is ``D P`` bounded away from zero uniformly in the frozen variables?

    ``D`` must act only on the free variables.
    """
    frozen = tuple(frozen)
    for name in frozen:
        if name in D.variables:
            i = D.variables.index(name)
            if any(u[i] for u in D.directions):
                raise ValueError(f"operator differentiates the frozen variable {name!r}")
    Q = D.apply(P)
    fz = tuple(v for v in Q.vars if v in frozen)
    free = tuple(v for v in Q.vars if v not in frozen)
    if not fz:
        coeffs = (MultiPoly.constant((), c) for _, c in Q.items())
        return decide_family(list(coeffs), (), image=Q)
    if not free:
        return decide_family([Q], fz, image=Q)
    # coefficient of each free monomial, as a polynomial in the frozen variables
    coeffs = list(expand_in(Q, free).values())
    return decide_family(coeffs, fz, image=Q)


def _residual_family(P: MultiPoly, params: tuple[str, ...], sys: ProjectionSystem, d: int):
    span = pulled_back_span(sys, d)
    parts = expand_in(P, params)
    # residual component i, as a polynomial in the parameters
    comps: list[dict] = [dict() for _ in span.basis]
    for key, c in parts.items():
        c = c.with_vars(sys.variables)
        if c.degree() > d:
            raise ValueError(f"degree bound {d} is below the degree {c.degree()} of a coefficient")
        r = span.solver.residual(coefficient_vector(c, span.basis))
        for i, x in enumerate(r):
            if x:
                comps[i][key] = x
    return [MultiPoly(params, t) for t in comps]


def uniform_residual_positive(P: MultiPoly, reduced_sys: ProjectionSystem, d: int,
                              domain: Domain = RealLine(),
                              params: Sequence[str] | None = None) -> UniformityVerdict:
    """Is the distance from ``P(., t)`` to the degenerate span bounded below in ``t``?

    ``params`` defaults to the variables of ``P`` outside ``reduced_sys``.
    The orthogonal residual of ``P`` is linear in its parameter-monomial
    coefficients, so each residual component is an explicit polynomial in
    the parameters.
    """
    if params is None:
        params = tuple(v for v in P.vars if v not in reduced_sys.variables)
    params = tuple(params)
    extra = [v for v in P.active_vars() if v not in params and v not in reduced_sys.variables]
    if extra:
        raise ValueError(f"phase variables {extra} are neither parameters nor ambient")
    active_params = [v for v in params if v in P.active_vars()]
    if not active_params:
        verdict = degeneracy_decompose(P.with_vars(reduced_sys.variables), reduced_sys, d)
        status = IDENTICALLY_ZERO if verdict.degenerate else POSITIVE
        return UniformityVerdict(status, params, domain=domain, degeneracy=verdict)
    P = P.with_vars(reduced_sys.variables + params)
    comps = _residual_family(P, params, reduced_sys, d)
    return decide_family(comps, params, domain)


@dataclass(frozen=True)
class DifferencePhase:
    """Difference-phase check: the verdict plus the supporting evidence."""

    verdict: UniformityVerdict
    difference: MultiPoly
    direction: str
    parameter: str
    box_image: MultiPoly | None = None
    split: str = "rho = |lambda|^(-1/2)"

    @property
    def status(self) -> str:
        return self.verdict.status

    @property
    def positive(self) -> bool:
        return self.verdict.positive


def box_operator_image(p: MultiPoly, sys: ProjectionSystem) -> MultiPoly | None:
    """``(d_1^2 + ... + d_{m-1}^2 - d_m^2) p`` when that operator kills every projection.

    The wave operator annihilates ``f(v . x)`` exactly when ``v`` lies on the
    light cone ``v_1^2 + ... + v_{m-1}^2 = v_m^2``; returns None otherwise.
    """
    for v in sys.vectors:
        q = sum((c * c for c in v[:-1]), ZERO) - v[-1] * v[-1]
        if q:
            return None
    out = MultiPoly.zero(p.vars)
    for k, name in enumerate(sys.variables):
        second = p.partial(name).partial(name)
        out = out - second if k == sys.m - 1 else out + second
    return out


def difference_phase_check(P: MultiPoly, direction: str, sys_minus_pivot: ProjectionSystem, d: int,
                           param: str = SHIFT_PARAM) -> DifferencePhase:
    """Uniform nondegeneracy of ``P(x) - P(x + zeta e_direction)`` for ``|zeta| >= 1``."""
    if direction not in sys_minus_pivot.variables:
        raise ValueError(f"direction {direction!r} is not an ambient variable")
    P = P.with_vars(sys_minus_pivot.variables)
    diff = shift_substitute(P, direction, param)
    verdict = uniform_residual_positive(diff, sys_minus_pivot, d, OutsideRadius(1), (param,))
    box = box_operator_image(diff, sys_minus_pivot)
    return DifferencePhase(verdict, diff, direction, param, box)
