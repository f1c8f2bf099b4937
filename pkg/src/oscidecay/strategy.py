"""Decay-certificate routes for a multilinear oscillatory functional.

Four routes are tried:

* ``direct-L2``: the L^2 theorem on the whole system (all L^2).
* ``grouped``: freeze a set of coordinates, multiply together the factors
  whose free parts are parallel, and apply the L^2 theorem slice by slice.
  One factor per group keeps its L^2 norm.
* ``cauchy-schwarz``: peel off a factor that does not depend on one
  coordinate, square out that coordinate and apply the L^2 theorem to the
  difference phase.  The peeled factor and one companion keep L^2.
* ``annihilator-Linfty``: a differential-operator witness of nondegeneracy
  for the full system (all L^infinity).

Certificates are ranked by number of L^2 norms, then by fewer frozen
coordinates, then by label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .linalg import rank
from .nondegeneracy import (DiffOperator, GeneralPosition, L2Check, ProjectionSystem, Witness,
                            annihilator_witness, cltt_l2_predicate, count_condition,
                            default_witness_pool, general_position)
from .poly import MultiPoly
from .scalar import QuadExtScalar
from .sturm import RealLine
from .uniformity import (IDENTICALLY_ZERO, UNDECIDED, DifferencePhase, UniformityVerdict,
                         difference_phase_check, hyp_check, uniform_residual_positive)

L2 = "2"
LINF = "inf"

DIRECT = "direct-L2"
GROUPED = "grouped"
CAUCHY_SCHWARZ = "cauchy-schwarz"
ANNIHILATOR = "annihilator-Linfty"

# cap on pool operators tried when searching for a hyp-style witness
HYP_SEARCH_LIMIT = 64


@dataclass(frozen=True)
class Functional:
    """Projection system, phase, degree bound and (optional) cutoff radii."""

    sys: ProjectionSystem
    phase: MultiPoly
    degree_bound: int | None = None
    cutoff: tuple[float, ...] | None = None
    name: str = ""

    def __post_init__(self):
        extra = [v for v in self.phase.active_vars() if v not in self.sys.variables]
        if extra:
            raise ValueError(f"phase uses variables {extra} outside the ambient space")
        object.__setattr__(self, "phase", self.phase.with_vars(self.sys.variables))
        d = self.degree_bound
        if d is None:
            d = max(self.phase.degree(), 1)
        if d < self.phase.degree():
            raise ValueError(f"degree bound {d} is below deg P = {self.phase.degree()}")
        object.__setattr__(self, "degree_bound", d)
        if self.cutoff is not None:
            object.__setattr__(self, "cutoff", tuple(float(r) for r in self.cutoff))

    @property
    def variables(self) -> tuple[str, ...]:
        return self.sys.variables

    @property
    def n(self) -> int:
        return self.sys.n

    @property
    def m(self) -> int:
        return self.sys.m

    def with_phase(self, phase: MultiPoly) -> Functional:
        d = max(self.degree_bound, phase.degree())
        return Functional(self.sys, phase, d, self.cutoff, self.name)


# -- freezing and grouping ------------------------------------------------------------

@dataclass(frozen=True)
class HypEvidence:
    operator: DiffOperator
    verdict: UniformityVerdict


@dataclass(frozen=True)
class FreezeAnalysis:
    """Outcome of freezing ``frozen`` and grouping the factors.

    ``groups`` partition the factors with nonzero free part; ``reduced_sys``
    is the system the L^2 theorem is applied to.  When coordinates had to be
    integrated out first, ``marginalized`` lists them with the groups they
    merged, and ``reduced_sys`` lives on the remaining coordinates.
    """

    frozen: tuple[str, ...]
    free: tuple[str, ...]
    groups: tuple[tuple[int, ...], ...]
    passthrough: tuple[int, ...]
    reduced_sys: ProjectionSystem | None
    count_ok: bool
    general_position: GeneralPosition | None
    uniform: UniformityVerdict | None
    hyp: HypEvidence | None = None
    reasons: tuple[str, ...] = ()
    marginalized: tuple[tuple[str, tuple[int, ...]], ...] = ()

    @property
    def reduced_dim(self) -> int:
        return len(self.free)

    @property
    def accepted(self) -> bool:
        return not self.reasons

    def norms(self, n: int) -> tuple[str, ...]:
        out = [LINF] * n
        for g in self.groups:
            out[min(g) - 1] = L2
        return tuple(out)


def _free_part(v, keep: list[int]) -> tuple[QuadExtScalar, ...]:
    return tuple(v[i] for i in keep)


def _parallel(u, w) -> bool:
    return rank([u, w]) == 1


def group_factors(sys: ProjectionSystem, frozen: Sequence[str]):
    """Groups of 1-based factor indices with parallel free parts, plus passthrough factors."""
    keep = [i for i, v in enumerate(sys.variables) if v not in frozen]
    groups: list[list[int]] = []
    reps: list[tuple] = []
    passthrough = []
    for j, v in enumerate(sys.vectors, 1):
        u = _free_part(v, keep)
        if not any(u):
            passthrough.append(j)
            continue
        for g, r in zip(groups, reps):
            if _parallel(u, r):
                g.append(j)
                break
        else:
            groups.append([j])
            reps.append(u)
    return tuple(tuple(g) for g in groups), tuple(passthrough), tuple(reps)


def marginalize(coords: Sequence[str], reps: Sequence[tuple], groups: Sequence[tuple[int, ...]],
                phase_vars: Sequence[str]):
    """Integrate out coordinates that occur in exactly two slots and not in the phase.

    For such a coordinate w, Cauchy-Schwarz in w gives
    ``|int g(a.x + alpha w) h(b.x + beta w) dw| <= C ||g||_2 ||h||_2``, and
    the integral is a bounded function of ``(a/alpha - b/beta) . x``.  Both
    slots keep their L^2 norms and the new bounded factor joins a parallel
    slot when there is one.  Returns the remaining coordinates, slot
    vectors, slot memberships and the steps taken.
    """
    coords = list(coords)
    slots = [(list(r), tuple(g)) for r, g in zip(reps, groups)]
    steps = []
    changed = True
    while changed and len(coords) > 2:
        changed = False
        for k, w in enumerate(coords):
            if w in phase_vars:
                continue
            hit = [i for i, (v, _) in enumerate(slots) if v[k]]
            if len(hit) != 2:
                continue
            (a, ga), (b, gb) = slots[hit[0]], slots[hit[1]]
            ia, ib = a[k].inverse(), b[k].inverse()
            new = [x * ia - y * ib for x, y in zip(a, b)]
            del new[k]
            rest = [(v[:k] + v[k + 1:], g) for i, (v, g) in enumerate(slots) if i not in hit]
            merged = ga + gb
            for i, (v, g) in enumerate(rest):
                if _parallel(v, new):
                    rest[i] = (v, g + merged)
                    break
            else:
                rest.append((new, merged))
            slots = rest
            del coords[k]
            steps.append((w, tuple(sorted(merged))))
            changed = True
            break
    return tuple(coords), [tuple(v) for v, _ in slots], [g for _, g in slots], tuple(steps)


def _find_hyp(P: MultiPoly, frozen, reduced: ProjectionSystem, ambient) -> HypEvidence | None:
    for D in default_witness_pool(reduced)[:HYP_SEARCH_LIMIT]:
        lifted = D.lifted(ambient)
        if lifted.apply(P).is_zero():
            continue
        v = hyp_check(P, frozen, lifted)
        if v.positive:
            return HypEvidence(lifted, v)
    return None


def find_hyp_witness(fn: Functional, frozen: Sequence[str]) -> HypEvidence | None:
    """Search the annihilator pool of the grouped free system for a uniformly positive D P."""
    S = tuple(v for v in fn.variables if v in set(frozen))
    free = tuple(v for v in fn.variables if v not in S)
    groups, _, reps = group_factors(fn.sys, S)
    if not groups or len(free) < 2:
        return None
    return _find_hyp(fn.phase, S, ProjectionSystem(free, reps), fn.variables)


def _sliced_checks(fn: Functional, S, coords, reps, labels):
    """Count, general position and uniformity for one reduced system."""
    reasons = []
    reduced = ProjectionSystem(coords, reps)
    count_ok, _ = count_condition(len(reps), len(coords))
    if not count_ok:
        reasons.append(f"count {len(reps)} ≮ {2 * len(coords)}")
    gp = general_position(reduced)
    if not gp:
        reasons.append(f"general position fails: groups {[labels[i - 1] for i in gp.failing_subset]}")
    verdict = uniform_residual_positive(fn.phase, reduced, fn.degree_bound, RealLine(), S)
    hyp = None
    if verdict.positive or verdict.status == UNDECIDED:
        hyp = _find_hyp(fn.phase, S, reduced, fn.variables)
        if hyp is not None and verdict.status == UNDECIDED:
            verdict = hyp.verdict
    if not verdict.positive:
        reasons.append(f"uniformity {verdict.describe()}")
    return reduced, count_ok, gp, verdict, hyp, reasons


def analyze_freezing(fn: Functional, frozen: Sequence[str]) -> FreezeAnalysis:
    """Freeze the coordinates ``frozen`` and check the sliced L^2 theorem's hypotheses.

    If the grouped system fails, coordinates that can be integrated out
    (see :func:`marginalize`) are removed and the checks are rerun; the
    recorded reasons are those of the direct attempt when both fail.
    """
    unknown = set(frozen) - set(fn.variables)
    if unknown:
        raise ValueError(f"unknown coordinates {sorted(unknown)}")
    S = tuple(v for v in fn.variables if v in set(frozen))
    if len(S) > fn.m - 2:
        raise ValueError(f"cannot freeze {len(S)} of {fn.m} coordinates: "
                         "at least 2 free coordinates are needed")
    free = tuple(v for v in fn.variables if v not in S)
    groups, passthrough, reps = group_factors(fn.sys, S)
    if not groups:
        return FreezeAnalysis(S, free, groups, passthrough, None, False, None, None,
                              reasons=("no factor depends on the free coordinates",))
    reduced, count_ok, gp, verdict, hyp, reasons = _sliced_checks(fn, S, free, reps, groups)
    if reasons:
        coords, mreps, slots, steps = marginalize(free, reps, groups, fn.phase.active_vars())
        if steps:
            alt = _sliced_checks(fn, S, coords, mreps, slots)
            if not alt[5]:
                return FreezeAnalysis(S, free, groups, passthrough, alt[0], alt[1], alt[2], alt[3],
                                      alt[4], (), steps)
    return FreezeAnalysis(S, free, groups, passthrough, reduced, count_ok, gp, verdict, hyp,
                          tuple(reasons))


# -- certificates ------------------------------------------------------------------

@dataclass(frozen=True)
class DecayCertificate:
    route: str
    norms: tuple[str, ...]
    frozen: tuple[str, ...] = ()
    pivot: int | None = None
    companion: int | None = None
    direction: str | None = None
    operator: DiffOperator | None = None
    evidence: object = field(default=None, compare=False)

    @property
    def l2_count(self) -> int:
        return sum(1 for s in self.norms if s == L2)

    @property
    def label(self) -> str:
        if self.route == GROUPED:
            return f"{GROUPED}{{{','.join(self.frozen)}}}"
        if self.route == CAUCHY_SCHWARZ:
            return f"{CAUCHY_SCHWARZ}(f{self.pivot},{self.direction})"
        return self.route

    def norm_string(self) -> str:
        return "(" + ",".join("∞" if s == LINF else s for s in self.norms) + ")"

    def rank_key(self):
        return (-self.l2_count, len(self.frozen), self.label)


@dataclass(frozen=True)
class Rejection:
    route: str
    label: str
    reasons: tuple[str, ...]
    evidence: object = field(default=None, compare=False)


def grouped_certificate(fn: Functional, frozen: Sequence[str]) -> DecayCertificate | Rejection:
    a = analyze_freezing(fn, frozen)
    label = f"{GROUPED}{{{','.join(a.frozen)}}}"
    if not a.accepted:
        return Rejection(GROUPED, label, a.reasons, a)
    return DecayCertificate(GROUPED, a.norms(fn.n), a.frozen, evidence=a)


def direct_l2_certificate(fn: Functional) -> DecayCertificate | Rejection:
    check = cltt_l2_predicate(fn.phase, fn.sys, fn.degree_bound)
    if not check.accepted:
        return Rejection(DIRECT, DIRECT, (check.reason,), check)
    return DecayCertificate(DIRECT, (L2,) * fn.n, evidence=check)


@dataclass(frozen=True)
class CauchySchwarzEvidence:
    count_ok: bool
    general_position: GeneralPosition
    difference: DifferencePhase
    witness: Witness | None = None


def cauchy_schwarz_certificate(fn: Functional, pivot: int, direction: str) -> DecayCertificate | Rejection:
    """Peel factor ``pivot`` and square out ``direction``.

    The peeled vector must have zero component along ``direction``.  The
    remaining n-1 projections must satisfy the L^2 theorem's count and
    general-position conditions, and the difference phase must be uniformly
    nondegenerate for ``|zeta| >= 1``.
    """
    label = f"{CAUCHY_SCHWARZ}(f{pivot},{direction})"
    if not 1 <= pivot <= fn.n:
        raise ValueError(f"pivot {pivot} out of range 1..{fn.n}")
    if direction not in fn.variables:
        raise ValueError(f"unknown direction {direction!r}")
    k = fn.variables.index(direction)
    if fn.sys.vectors[pivot - 1][k]:
        return Rejection(CAUCHY_SCHWARZ, label, (f"f{pivot} depends on {direction}",))
    if fn.n < 3:
        return Rejection(CAUCHY_SCHWARZ, label, ("fewer than three factors",))
    rest = fn.sys.without(pivot)
    reasons = []
    count_ok, _ = count_condition(rest.n, rest.m)
    if not count_ok:
        reasons.append(f"count {rest.n} ≮ {2 * rest.m}")
    gp = general_position(rest)
    if not gp:
        idx = [j for j in range(1, fn.n + 1) if j != pivot]
        reasons.append(f"general position fails: factors {tuple(idx[i - 1] for i in gp.failing_subset)}")
    diff = difference_phase_check(fn.phase, direction, rest, fn.degree_bound)
    if not diff.positive:
        reasons.append(f"difference phase {diff.verdict.describe()}")
    witness = None
    if diff.positive:
        witness = annihilator_witness(diff.difference, rest, default_witness_pool(rest)[:HYP_SEARCH_LIMIT])
    ev = CauchySchwarzEvidence(count_ok, gp, diff, witness)
    if reasons:
        return Rejection(CAUCHY_SCHWARZ, label, tuple(reasons), ev)
    companion = min(j for j in range(1, fn.n + 1) if j != pivot)
    norms = tuple(L2 if j in (pivot, companion) else LINF for j in range(1, fn.n + 1))
    return DecayCertificate(CAUCHY_SCHWARZ, norms, pivot=pivot, companion=companion,
                            direction=direction, evidence=ev)


def annihilator_certificate(fn: Functional) -> DecayCertificate | Rejection:
    w = annihilator_witness(fn.phase, fn.sys)
    if w is None:
        return Rejection(ANNIHILATOR, ANNIHILATOR, ("no pool operator detects the phase",))
    return DecayCertificate(ANNIHILATOR, (LINF,) * fn.n, operator=w.operator, evidence=w)


# -- enumeration ------------------------------------------------------------------

@dataclass(frozen=True)
class Survey:
    certificates: tuple[DecayCertificate, ...]
    rejections: tuple[Rejection, ...]


def survey(fn: Functional, max_freeze: int | None = None) -> Survey:
    """Try every route; certificates come back ranked, rejections in trial order."""
    if max_freeze is None:
        max_freeze = fn.m - 2
    if max_freeze > fn.m - 2:
        raise ValueError(f"max_freeze {max_freeze} exceeds m - 2 = {fn.m - 2}")
    results = [direct_l2_certificate(fn)]
    for size in range(1, max_freeze + 1):
        for S in combinations(fn.variables, size):
            results.append(grouped_certificate(fn, S))
    for pivot in range(1, fn.n + 1):
        for direction in fn.variables:
            results.append(cauchy_schwarz_certificate(fn, pivot, direction))
    results.append(annihilator_certificate(fn))
    certs = sorted((r for r in results if isinstance(r, DecayCertificate)), key=DecayCertificate.rank_key)
    rejections = tuple(r for r in results if isinstance(r, Rejection))
    return Survey(tuple(certs), rejections)


def enumerate_strategies(fn: Functional, max_freeze: int | None = None) -> list[DecayCertificate]:
    """Ranked certificates.  An empty list means none was found, not that decay fails."""
    return list(survey(fn, max_freeze).certificates)


# -- validation ---------------------------------------------------------------------

@dataclass(frozen=True)
class Validation:
    ok: bool
    reason: str | None = None

    def __bool__(self):
        return self.ok


def validate_certificate(cert: DecayCertificate, fn: Functional) -> Validation:
    """Re-derive every check behind ``cert`` from scratch."""
    if len(cert.norms) != fn.n or any(s not in (L2, LINF) for s in cert.norms):
        return Validation(False, "norm list does not match the factors")
    if cert.route == DIRECT:
        check: L2Check = cltt_l2_predicate(fn.phase, fn.sys, fn.degree_bound)
        if not check.accepted:
            return Validation(False, check.reason)
        return Validation(True)
    if cert.route == GROUPED:
        if len(cert.frozen) > fn.m - 2:
            return Validation(False, "too many frozen coordinates")
        a = analyze_freezing(fn, cert.frozen)
        if a.reasons:
            return Validation(False, a.reasons[0] if len(a.reasons) == 1 else "; ".join(a.reasons))
        for g in a.groups:
            if sum(cert.norms[j - 1] == L2 for j in g) != 1:
                return Validation(False, "group norm rule")
        if any(cert.norms[j - 1] == L2 for j in a.passthrough):
            return Validation(False, "group norm rule")
        return Validation(True)
    if cert.route == CAUCHY_SCHWARZ:
        if cert.pivot is None or cert.direction is None:
            return Validation(False, "missing pivot or direction")
        redo = cauchy_schwarz_certificate(fn, cert.pivot, cert.direction)
        if isinstance(redo, Rejection):
            return Validation(False, "; ".join(redo.reasons))
        if redo.norms != cert.norms:
            return Validation(False, "cauchy-schwarz norm rule")
        return Validation(True)
    if cert.route == ANNIHILATOR:
        D = cert.operator
        if D is None:
            return Validation(False, "missing operator")
        if not D.annihilates(fn.sys):
            return Validation(False, "operator does not annihilate every projection")
        if D.apply(fn.phase).is_zero():
            return Validation(False, "operator kills the phase")
        if L2 in cert.norms:
            return Validation(False, "annihilator route carries only L^infinity norms")
        return Validation(True)
    return Validation(False, f"unknown route {cert.route!r}")
