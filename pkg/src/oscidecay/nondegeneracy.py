"""Degeneracy, general position and annihilator witnesses for 1-D projection systems.

A phase ``P`` is degenerate for vectors ``v_1..v_n`` when it can be written as
``sum_j p_j(v_j . x)``.  :func:`degeneracy_decompose` decides this exactly in
the space of polynomials of degree at most ``d``; an annihilator witness is a
product of directional derivatives that kills every ``f(v_j . x)`` but not
``P``, and so certifies nondegeneracy without solving anything.

Factor indices in results are 1-based, matching the ``f_1, f_2, ...`` naming.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .linalg import SpanSolver, dot, rank
from .poly import MultiPoly, coefficient_vector, monomial_basis
from .scalar import ONE, ZERO, QuadExtScalar, as_scalar

DEFAULT_POOL_CAP = 512


class NotAnAnnihilatorError(ValueError):
    """A candidate operator does not kill every function of some projection."""


@dataclass(frozen=True)
class ProjectionSystem:
    """Ambient coordinates plus one direction vector per factor (kappa = 1)."""

    variables: tuple[str, ...]
    vectors: tuple[tuple[QuadExtScalar, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        vecs = tuple(tuple(as_scalar(c) for c in v) for v in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        if len(self.variables) < 2:
            raise ValueError("ambient dimension must be at least 2")
        for j, v in enumerate(vecs, 1):
            if len(v) != len(self.variables):
                raise ValueError(f"vector {j} has length {len(v)}, expected {len(self.variables)}")
            if not any(v):
                raise ValueError(f"vector {j} is zero")

    @property
    def m(self) -> int:
        return len(self.variables)

    @property
    def n(self) -> int:
        return len(self.vectors)

    def form(self, j: int) -> MultiPoly:
        """The linear form ``v_j . x`` (1-based ``j``)."""
        return MultiPoly.linear_form(self.variables, self.vectors[j - 1])

    def without(self, j: int) -> ProjectionSystem:
        return ProjectionSystem(self.variables, self.vectors[:j - 1] + self.vectors[j:])

    def subsystem(self, indices: Sequence[int]) -> ProjectionSystem:
        return ProjectionSystem(self.variables, tuple(self.vectors[j - 1] for j in indices))

    def permuted(self, order: Sequence[int]) -> ProjectionSystem:
        return self.subsystem(order)


# -- degeneracy -----------------------------------------------------------------

@dataclass(frozen=True)
class DegeneracyVerdict:
    """Either an exact decomposition (``components``) or a positive squared distance."""

    components: tuple[MultiPoly, ...] | None = None
    distance_sq: QuadExtScalar | None = None
    degree_bound: int = 0

    @property
    def degenerate(self) -> bool:
        return self.components is not None

    def reconstruct(self, sys: ProjectionSystem) -> MultiPoly:
        """``sum_j p_j(v_j . x)`` for a decomposition verdict."""
        if self.components is None:
            raise ValueError("nondegenerate verdict has no decomposition")
        total = MultiPoly.zero(sys.variables)
        for j, pj in enumerate(self.components, 1):
            lf = sys.form(j)
            for (k,), c in pj.items():
                total = total + (lf ** k).scale(c)
        return total


@dataclass(frozen=True)
class _PulledBackSpan:
    basis: tuple            # monomial exponents, degree <= d
    columns: tuple          # (factor index or 0 for constant, power)
    solver: SpanSolver


@lru_cache(maxsize=256)
def pulled_back_span(sys: ProjectionSystem, d: int) -> _PulledBackSpan:
    """Span of ``{1} U {(v_j . x)^k : 1 <= k <= d}`` in coefficient space.

    Later factors come first among the columns, so when the pulled-back
    powers are linearly dependent the decomposition leaves ``p_1`` (the factor
    peeled off by the Cauchy-Schwarz route) unused where possible.
    """
    basis = tuple(monomial_basis(sys.m, d))
    cols = [(0, 0)]
    vecs = [coefficient_vector(MultiPoly.constant(sys.variables, ONE), basis)]
    for j in range(sys.n, 0, -1):
        lf = sys.form(j)
        power = MultiPoly.constant(sys.variables, ONE)
        for k in range(1, d + 1):
            power = power * lf
            cols.append((j, k))
            vecs.append(coefficient_vector(power, basis))
    return _PulledBackSpan(basis, tuple(cols), SpanSolver(vecs))


def _lift(P: MultiPoly, variables: tuple[str, ...]) -> MultiPoly:
    try:
        return P.with_vars(variables)
    except ValueError as exc:
        raise ValueError(f"phase uses variables outside {variables}: {exc}") from None


def degeneracy_decompose(P: MultiPoly, sys: ProjectionSystem, d: int) -> DegeneracyVerdict:
    P = _lift(P, sys.variables)
    if P.degree() > d:
        raise ValueError(f"degree bound {d} is below deg P = {P.degree()}")
    span = pulled_back_span(sys, d)
    target = coefficient_vector(P, span.basis)
    coeffs = span.solver.solve(target)
    if coeffs is None:
        return DegeneracyVerdict(distance_sq=span.solver.residual_norm_sq(target), degree_bound=d)
    parts: list[dict] = [dict() for _ in range(sys.n)]
    for (j, k), c in zip(span.columns, coeffs):
        if not c:
            continue
        slot = parts[(j or 1) - 1]
        slot[(k,)] = slot.get((k,), ZERO) + c
    comps = tuple(MultiPoly(("t",), terms) for terms in parts)
    return DegeneracyVerdict(components=comps, degree_bound=d)


# -- general position -------------------------------------------------------------

@dataclass(frozen=True)
class GeneralPosition:
    holds: bool
    failing_subset: tuple[int, ...] | None = None

    def __bool__(self):
        return self.holds


def general_position(sys: ProjectionSystem) -> GeneralPosition:
    """Check that every subset of k <= m vectors is linearly independent."""
    for k in range(2, min(sys.n, sys.m) + 1):
        for subset in combinations(range(1, sys.n + 1), k):
            if rank([sys.vectors[j - 1] for j in subset]) < k:
                return GeneralPosition(False, subset)
    return GeneralPosition(True)


# -- differential operators -------------------------------------------------------

@dataclass(frozen=True)
class DiffOperator:
    """Composition of first-order directional derivatives over named variables."""

    variables: tuple[str, ...]
    directions: tuple[tuple[QuadExtScalar, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        dirs = tuple(tuple(as_scalar(c) for c in u) for u in self.directions)
        object.__setattr__(self, "directions", dirs)
        for u in dirs:
            if len(u) != len(self.variables):
                raise ValueError("direction length does not match variables")
            if not any(u):
                raise ValueError("zero direction in differential operator")

    @property
    def order(self) -> int:
        return len(self.directions)

    def apply(self, p: MultiPoly) -> MultiPoly:
        """Apply to ``p``; variables of ``p`` outside ``self.variables`` get zero components."""
        missing = [v for v in self.variables if v not in p.vars]
        if missing:
            p = p.with_vars(p.vars + tuple(missing))
        for u in reversed(self.directions):
            acc = MultiPoly.zero(p.vars)
            for name, c in zip(self.variables, u):
                if c:
                    acc = acc + p.partial(name).scale(c)
            p = acc
        return p

    def kills(self, v: Sequence) -> bool:
        """True when some factor direction is orthogonal to ``v``."""
        v = [as_scalar(c) for c in v]
        return any(not dot(u, v) for u in self.directions)

    def annihilates(self, sys: ProjectionSystem) -> bool:
        return all(self.kills(v) for v in sys.vectors)

    def lifted(self, variables: Sequence[str]) -> DiffOperator:
        """Same operator over a larger variable set (zero components elsewhere)."""
        variables = tuple(variables)
        idx = {v: i for i, v in enumerate(self.variables)}
        dirs = tuple(tuple(u[idx[v]] if v in idx else ZERO for v in variables) for u in self.directions)
        return DiffOperator(variables, dirs)

    def __str__(self):
        parts = []
        for u in self.directions:
            terms = []
            for name, c in zip(self.variables, u):
                if not c:
                    continue
                if c == 1:
                    s = f"d{name}"
                elif c == -1:
                    s = f"-d{name}"
                elif c.is_rational() or c.rat == 0:
                    s = f"{c}*d{name}"
                else:
                    s = f"({c})*d{name}"
                terms.append(s)
            text = " + ".join(terms).replace("+ -", "- ")
            parts.append(text if len(terms) == 1 and not text.startswith("-") else f"({text})")
        return " ".join(parts)


def _normalize_direction(u: Sequence[QuadExtScalar]) -> tuple[QuadExtScalar, ...]:
    lead = next(c for c in u if c)
    inv = lead.inverse()
    return tuple(c * inv for c in u)


def candidate_directions(sys: ProjectionSystem) -> list[tuple[tuple[QuadExtScalar, ...], int]]:
    """Distinct directions (up to scale) with the bitmask of factors each one kills.

    Per factor j: coordinate axes orthogonal to v_j, sums/differences of two
    axes orthogonal to v_j, and the components of the other v_a orthogonal
    to v_j.
    """
    m = sys.m
    axes = [tuple(as_scalar(int(i == k)) for i in range(m)) for k in range(m)]
    pairs = []
    for a in range(m):
        for b in range(a + 1, m):
            for s in (1, -1):
                pairs.append(tuple(as_scalar(int(i == a) + s * int(i == b)) for i in range(m)))
    seen: dict[tuple, int] = {}
    order: list[tuple] = []

    def add(u):
        if not any(u):
            return
        key = _normalize_direction(u)
        if key not in seen:
            seen[key] = 0
            order.append(key)

    for j, v in enumerate(sys.vectors):
        for u in axes + pairs:
            if not dot(u, v):
                add(u)
        vv = dot(v, v)
        for a, w in enumerate(sys.vectors):
            if a != j:
                c = dot(w, v) / vv
                add(tuple(x - c * y for x, y in zip(w, v)))
    out = []
    for u in order:
        mask = 0
        for j, v in enumerate(sys.vectors):
            if not dot(u, v):
                mask |= 1 << j
        out.append((u, mask))
    return out


def _is_minimal(combo: tuple[int, ...], masks: list[int], full: int) -> bool:
    for skip in combo:
        rest = 0
        for i in combo:
            if i != skip:
                rest |= masks[i]
        if rest == full:
            return False
    return True


@lru_cache(maxsize=128)
def default_witness_pool(sys: ProjectionSystem, cap: int = DEFAULT_POOL_CAP) -> tuple[DiffOperator, ...]:
    """Minimal products of candidate directions that annihilate every factor.

    Operators are listed by increasing order, then by candidate indices.  A
    non-minimal cover is a further derivative of a minimal one, so it can only
    succeed where a minimal cover already does; those are skipped.
    """
    cands = [(u, mask) for u, mask in candidate_directions(sys) if mask]
    if not cands:
        return ()
    masks = [mask for _, mask in cands]
    full = (1 << sys.n) - 1
    widest = max(bin(mk).count("1") for mk in masks)
    pool: list[DiffOperator] = []

    for size in range(1, sys.n + 1):
        level: set[tuple[int, ...]] = set()
        visited: set[tuple[int, ...]] = set()

        def grow(chosen: tuple[int, ...], covered: int):
            if chosen in visited:
                return
            visited.add(chosen)
            if covered == full:
                if len(chosen) == size and _is_minimal(chosen, masks, full):
                    level.add(chosen)
                return
            left = size - len(chosen)
            if left == 0 or bin(full & ~covered).count("1") > left * widest:
                return
            j = (full & ~covered & -(full & ~covered)).bit_length() - 1
            for i, mk in enumerate(masks):
                if mk >> j & 1 and i not in chosen:
                    grow(tuple(sorted(chosen + (i,))), covered | mk)

        grow((), 0)
        for combo in sorted(level):
            pool.append(DiffOperator(sys.variables, tuple(cands[i][0] for i in combo)))
            if len(pool) >= cap:
                return tuple(pool)
    return tuple(pool)


@dataclass(frozen=True)
class Witness:
    operator: DiffOperator
    image: MultiPoly


def annihilator_witness(P: MultiPoly, sys: ProjectionSystem,
                        pool: Sequence[DiffOperator] | None = None) -> Witness | None:
    """First operator in ``pool`` that kills every projection but not ``P``.

    Returning None only means the pool was inconclusive.
    """
    if pool is None:
        pool = default_witness_pool(sys)
    for i, D in enumerate(pool):
        if D.variables != sys.variables:
            D = D.lifted(sys.variables) if set(D.variables) <= set(sys.variables) else D
        bad = [j for j, v in enumerate(sys.vectors, 1) if not D.kills(v)]
        if bad:
            raise NotAnAnnihilatorError(
                f"pool operator {i} ({D}) does not annihilate functions of factors {bad}")
    for D in pool:
        image = D.apply(P)
        if not image.is_zero():
            return Witness(D, image)
    return None


# -- L^2 theorem applicability ----------------------------------------------------------

@dataclass(frozen=True)
class L2Check:
    accepted: bool
    reason: str | None
    count_ok: bool
    general_position: GeneralPosition | None = None
    degeneracy: DegeneracyVerdict | None = None
    n: int = 0
    m: int = 0


def count_condition(n: int, m: int) -> tuple[bool, str | None]:
    if n < 2 * m:
        return True, None
    return False, f"n < 2m fails: {n} ≮ {2 * m}"


def cltt_l2_predicate(P: MultiPoly, sys: ProjectionSystem, d: int) -> L2Check:
    """Accept iff n < 2m, the directions are in general position and P is nondegenerate."""
    ok, reason = count_condition(sys.n, sys.m)
    if not ok:
        return L2Check(False, reason, False, n=sys.n, m=sys.m)
    gp = general_position(sys)
    if not gp:
        return L2Check(False, f"general position fails: subset {gp.failing_subset}", True, gp,
                       n=sys.n, m=sys.m)
    verdict = degeneracy_decompose(P, sys, d)
    if verdict.degenerate:
        return L2Check(False, "phase is degenerate", True, gp, verdict, n=sys.n, m=sys.m)
    return L2Check(True, None, True, gp, verdict, n=sys.n, m=sys.m)
