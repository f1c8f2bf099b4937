"""Univariate gcd and Sturm real-root counting with exact signs.

Univariate polynomials are :class:`MultiPoly` values with at most one active
variable.  Internally they are handled as coefficient lists, lowest degree
first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Sequence

from .poly import MultiPoly
from .scalar import ONE, ZERO, QuadExtScalar, as_scalar

Coeffs = list[QuadExtScalar]


# -- root-count domains ---------------------------------------------------------

@dataclass(frozen=True)
class RealLine:
    def __str__(self):
        return "all reals"


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]; endpoints may be ``None`` for -inf / +inf."""
    lo: object = None
    hi: object = None

    def __str__(self):
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "+inf" if self.hi is None else str(self.hi)
        return f"[{lo}, {hi}]"


@dataclass(frozen=True)
class OutsideRadius:
    """The set |t| >= radius."""
    radius: object = 1

    def __str__(self):
        return f"|t| >= {self.radius}"


Domain = RealLine | Interval | OutsideRadius


# -- coefficient-list helpers ---------------------------------------------------

def _trim(c: Coeffs) -> Coeffs:
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return c


def univariate_var(p: MultiPoly) -> str | None:
    active = p.active_vars()
    if len(active) > 1:
        raise ValueError(f"expected a univariate polynomial, got variables {active}")
    return active[0] if active else None


def to_coeffs(p: MultiPoly) -> Coeffs:
    var = univariate_var(p)
    if var is None:
        return _trim([p.constant_term()])
    i = p.vars.index(var)
    out = [ZERO] * (p.degree_in(var) + 1)
    for e, c in p.items():
        out[e[i]] = c
    return _trim(out)


def from_coeffs(c: Sequence, variables: Sequence[str], var: str) -> MultiPoly:
    i = list(variables).index(var)
    terms = {}
    for k, v in enumerate(c):
        e = [0] * len(variables)
        e[i] = k
        terms[tuple(e)] = v
    return MultiPoly(variables, terms)


def _derivative(c: Coeffs) -> Coeffs:
    return _trim([c[k] * k for k in range(1, len(c))])


def _divmod(a: Coeffs, b: Coeffs) -> tuple[Coeffs, Coeffs]:
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = _trim(a)
    q = [ZERO] * max(len(a) - len(b) + 1, 1)
    lead_inv = b[-1].inverse()
    while len(a) >= len(b):
        shift = len(a) - len(b)
        f = a[-1] * lead_inv
        q[shift] = f
        for k, bc in enumerate(b):
            if bc:
                a[shift + k] = a[shift + k] - f * bc
        a = _trim(a[:-1])
    return _trim(q), a


def _monic(c: Coeffs) -> Coeffs:
    inv = c[-1].inverse()
    return [x * inv for x in c]


def _gcd(a: Coeffs, b: Coeffs) -> Coeffs:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _divmod(a, b)[1]
    return _monic(a) if a else a


def _eval(c: Coeffs, t) -> QuadExtScalar:
    acc = ZERO
    for x in reversed(c):
        acc = acc * t + x
    return acc


def _sign_at(c: Coeffs, t) -> int:
    """Sign at a finite point, or at +-inf when ``t`` is the string '+inf'/'-inf'."""
    if t == "+inf":
        return c[-1].sign()
    if t == "-inf":
        s = c[-1].sign()
        return s if (len(c) - 1) % 2 == 0 else -s
    return _eval(c, t).sign()


def _squarefree(c: Coeffs) -> Coeffs:
    g = _gcd(c, _derivative(c))
    if len(g) <= 1:
        return c
    return _divmod(c, g)[0]


def _chain(c: Coeffs) -> list[Coeffs]:
    chain = [c, _derivative(c)]
    while chain[-1]:
        r = _divmod(chain[-2], chain[-1])[1]
        if not r:
            break
        chain.append([-x for x in r])
    return [p for p in chain if p]


def _variations(chain: list[Coeffs], t) -> int:
    signs = [s for s in (_sign_at(p, t) for p in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


# -- public operations ----------------------------------------------------------

def sturm_chain(p: MultiPoly) -> list[MultiPoly]:
    """Sturm chain of the square-free part of ``p`` (last entry a nonzero constant)."""
    c = to_coeffs(p)
    if not c:
        raise ValueError("Sturm chain of the zero polynomial is undefined")
    var = univariate_var(p)
    if var is None:
        return [p]
    return [from_coeffs(q, p.vars, var) for q in _chain(_squarefree(c))]


def _count_closed(chain: list[Coeffs], lo, hi) -> int:
    """Distinct roots in [lo, hi] (endpoints finite scalars or '-inf'/'+inf')."""
    n = _variations(chain, lo) - _variations(chain, hi)
    if lo not in ("-inf", "+inf") and _sign_at(chain[0], lo) == 0:
        n += 1
    return n


def count_real_roots(p: MultiPoly, domain: Domain = RealLine()) -> int:
    """Number of distinct real roots of a nonzero univariate ``p`` in ``domain``."""
    c = to_coeffs(p)
    if not c:
        raise ValueError("root count of the zero polynomial is undefined")
    if len(c) == 1:
        return 0
    chain = _chain(_squarefree(c))
    sf = chain[0]
    if isinstance(domain, RealLine):
        return _count_closed(chain, "-inf", "+inf")
    if isinstance(domain, Interval):
        lo = "-inf" if domain.lo is None else as_scalar(domain.lo)
        hi = "+inf" if domain.hi is None else as_scalar(domain.hi)
        if lo not in ("-inf",) and hi not in ("+inf",) and lo > hi:
            return 0
        return _count_closed(chain, lo, hi)
    if isinstance(domain, OutsideRadius):
        r = as_scalar(domain.radius)
        if r.sign() <= 0:
            return _count_closed(chain, "-inf", "+inf")
        total = _count_closed(chain, "-inf", "+inf")
        inside_closed = _count_closed(chain, -r, r)
        on_boundary = int(_sign_at(sf, -r) == 0) + int(_sign_at(sf, r) == 0)
        return total - (inside_closed - on_boundary)
    raise TypeError(f"unknown domain {domain!r}")


def gcd_univariate(ps: Sequence[MultiPoly]) -> MultiPoly:
    """Monic gcd of univariate polynomials sharing one active variable."""
    ps = list(ps)
    if not ps:
        raise ValueError("gcd of an empty list")
    nonzero = [p for p in ps if not p.is_zero()]
    if not nonzero:
        raise ValueError("gcd of all-zero polynomials is undefined")
    names = {univariate_var(p) for p in nonzero} - {None}
    if len(names) > 1:
        raise ValueError(f"polynomials use different variables: {sorted(names)}")
    var = names.pop() if names else None
    g: Coeffs = []
    for p in nonzero:
        g = _gcd(g, to_coeffs(p)) if g else _monic(to_coeffs(p))
        if len(g) == 1:
            break
    variables = nonzero[0].vars
    if var is None:
        return MultiPoly.constant(variables, ONE)
    return from_coeffs(g, variables, var)


# -- root isolation (used for reporting where a family vanishes) ----------------

def _abs_bound(x: QuadExtScalar) -> Fraction:
    return abs(x.rat) + abs(x.irr) * (isqrt(x.radicand) + 1)


def root_bound(c: Coeffs) -> Fraction:
    """Cauchy bound: every real root satisfies |t| < bound."""
    lead = c[-1]
    # |a + b sqrt m| = |norm| / |a - b sqrt m|
    lead_lower = abs(lead.norm()) / _abs_bound(lead.conjugate())
    return 1 + max((_abs_bound(x) / lead_lower for x in c[:-1]), default=Fraction(0))


def isolate_real_roots(p: MultiPoly, domain: Domain = RealLine(), width=Fraction(1, 2**20)) -> list:
    """Disjoint rational intervals ``(lo, hi)`` each holding exactly one root in ``domain``.

    A root hit exactly by a bisection point or an endpoint is returned as ``(t, t)``.
    """
    c = to_coeffs(p)
    if len(c) <= 1:
        return []
    chain = _chain(_squarefree(c))
    sf = chain[0]
    bound = root_bound(sf)
    if isinstance(domain, RealLine):
        pieces = [(-bound, bound)]
    elif isinstance(domain, Interval):
        lo = -bound if domain.lo is None else Fraction(domain.lo)
        hi = bound if domain.hi is None else Fraction(domain.hi)
        pieces = [(lo, hi)] if lo <= hi else []
    else:
        r = Fraction(as_scalar(domain.radius).rat)
        pieces = [(-bound, -r), (r, bound)] if r < bound else []
    width = Fraction(width)
    out = []

    def is_root(t: Fraction) -> bool:
        return _sign_at(sf, as_scalar(t)) == 0

    def count_open(lo: Fraction, hi: Fraction) -> int:
        return _count_closed(chain, as_scalar(lo), as_scalar(hi)) - is_root(lo) - is_root(hi)

    def split(lo: Fraction, hi: Fraction):
        k = count_open(lo, hi)
        if k == 0:
            return
        if k == 1 and hi - lo <= width:
            out.append((lo, hi))
            return
        mid = (lo + hi) / 2
        if is_root(mid):
            out.append((mid, mid))
        split(lo, mid)
        split(mid, hi)

    for lo, hi in pieces:
        for t in (lo, hi):
            if is_root(t):
                out.append((t, t))
        split(lo, hi)
    return sorted(set(out))
