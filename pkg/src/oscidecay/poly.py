"""Multivariate polynomials over Q(sqrt(m)) in an ordered set of named variables."""

from __future__ import annotations

from itertools import combinations_with_replacement
from math import comb
from typing import Iterable, Mapping, Sequence

from .scalar import ONE, ZERO, QuadExtScalar, as_scalar, common_radicand

Exponent = tuple[int, ...]


def _check_vars(variables: Sequence[str]) -> tuple[str, ...]:
    vs = tuple(variables)
    if len(set(vs)) != len(vs):
        raise ValueError(f"variable names must be distinct: {vs}")
    return vs


class MultiPoly:
    """Immutable polynomial; ``terms`` maps exponent tuples to nonzero scalars."""

    __slots__ = ("vars", "_terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponent, object] | None = None):
        self.vars = _check_vars(variables)
        n = len(self.vars)
        clean: dict[Exponent, QuadExtScalar] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for variables {self.vars}")
            clean[exps] = clean.get(exps, ZERO) + as_scalar(c)
        self._terms = {e: c for e, c in clean.items() if c}
        self._hash = None

    @classmethod
    def _from_clean(cls, variables: tuple[str, ...], terms: dict) -> MultiPoly:
        obj = cls.__new__(cls)
        obj.vars = variables
        obj._terms = terms
        obj._hash = None
        return obj

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, variables: Sequence[str]) -> MultiPoly:
        return cls(variables)

    @classmethod
    def constant(cls, variables: Sequence[str], c) -> MultiPoly:
        vs = _check_vars(variables)
        return cls(vs, {(0,) * len(vs): c})

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> MultiPoly:
        vs = _check_vars(variables)
        if name not in vs:
            raise KeyError(f"unknown variable {name!r}")
        exps = tuple(1 if v == name else 0 for v in vs)
        return cls(vs, {exps: ONE})

    @classmethod
    def monomial(cls, variables: Sequence[str], exps: Exponent, c=1) -> MultiPoly:
        return cls(variables, {tuple(exps): c})

    @classmethod
    def linear_form(cls, variables: Sequence[str], coeffs: Sequence) -> MultiPoly:
        """``sum(coeffs[i] * variables[i])``."""
        vs = _check_vars(variables)
        if len(coeffs) != len(vs):
            raise ValueError("linear form length does not match variable count")
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * len(vs)
            e[i] = 1
            terms[tuple(e)] = c
        return cls(vs, terms)

    # -- basic queries -----------------------------------------------------
    @property
    def terms(self) -> dict[Exponent, QuadExtScalar]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self.vars.index(name)
        return max((e[i] for e in self._terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_term(self) -> QuadExtScalar:
        return self._terms.get((0,) * len(self.vars), ZERO)

    def coefficient(self, exps: Exponent) -> QuadExtScalar:
        return self._terms.get(tuple(exps), ZERO)

    def active_vars(self) -> tuple[str, ...]:
        used = [any(e[i] for e in self._terms) for i in range(len(self.vars))]
        return tuple(v for v, u in zip(self.vars, used) if u)

    def radicand(self) -> int | None:
        return common_radicand(self._terms.values())

    # -- variable-set management -------------------------------------------
    def with_vars(self, variables: Sequence[str]) -> MultiPoly:
        """Re-express over ``variables``; every active variable must be kept."""
        vs = _check_vars(variables)
        if vs == self.vars:
            return self
        missing = [v for v in self.active_vars() if v not in vs]
        if missing:
            raise ValueError(f"variables {missing} are used but not in {vs}")
        idx = [self.vars.index(v) if v in self.vars else None for v in vs]
        terms = {}
        for e, c in self._terms.items():
            terms[tuple(e[i] if i is not None else 0 for i in idx)] = c
        return MultiPoly._from_clean(vs, terms)

    def _align(self, other: MultiPoly) -> MultiPoly:
        if other.vars == self.vars:
            return other
        if set(other.active_vars()) <= set(self.vars):
            return other.with_vars(self.vars)
        raise ValueError(f"variable sets differ: {self.vars} vs {other.vars}")

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            return self._align(other)
        try:
            return MultiPoly.constant(self.vars, as_scalar(other))
        except (TypeError, ValueError):
            return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for e, c in other._terms.items():
            s = terms.get(e)
            s = c if s is None else s + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return MultiPoly._from_clean(self.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._from_clean(self.vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> MultiPoly:
        c = as_scalar(c)
        if not c:
            return MultiPoly._from_clean(self.vars, {})
        return MultiPoly._from_clean(self.vars, {e: c * v for e, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            try:
                return self.scale(other)
            except (TypeError, ValueError):
                return NotImplemented
        other = self._align(other)
        terms: dict[Exponent, QuadExtScalar] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e)
                terms[e] = c1 * c2 if s is None else s + c1 * c2
        return MultiPoly._from_clean(self.vars, {e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, MultiPoly):
            if not other.is_constant() or other.is_zero():
                raise ZeroDivisionError("can only divide by a nonzero constant")
            other = other.constant_term()
        return self.scale(as_scalar(other).inverse())

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = MultiPoly.constant(self.vars, ONE)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            try:
                other = self._align(other)
            except ValueError:
                return False
            return self._terms == other._terms
        try:
            return self._terms == MultiPoly.constant(self.vars, as_scalar(other))._terms
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and substitution -----------------------------------------
    def partial(self, name: str) -> MultiPoly:
        i = self.vars.index(name)
        terms = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                terms[ne] = c * e[i]
        return MultiPoly._from_clean(self.vars, terms)

    def evaluate(self, values: Mapping[str, object]):
        """Exact evaluation at scalar values for every variable."""
        vals = [as_scalar(values[v]) for v in self.vars]
        total = ZERO
        for e, c in self._terms.items():
            t = c
            for v, k in zip(vals, e):
                if k:
                    t = t * v ** k
            total = total + t
        return total

    def substitute(self, name: str, replacement) -> MultiPoly:
        """Replace variable ``name`` by a polynomial (or scalar) over the same variables."""
        i = self.vars.index(name)
        if not isinstance(replacement, MultiPoly):
            replacement = MultiPoly.constant(self.vars, replacement)
        replacement = self._align(replacement)
        powers = {0: MultiPoly.constant(self.vars, ONE)}
        result = MultiPoly._from_clean(self.vars, {})
        for e, c in self._terms.items():
            k = e[i]
            if k not in powers:
                powers[k] = replacement ** k
            rest = MultiPoly._from_clean(self.vars, {e[:i] + (0,) + e[i + 1:]: c})
            result = result + rest * powers[k]
        return result

    def specialize(self, values: Mapping[str, object]) -> MultiPoly:
        """Substitute scalars for some variables and drop them from the variable set."""
        keep = tuple(v for v in self.vars if v not in values)
        p = self
        for name, val in values.items():
            p = p.substitute(name, val)
        return p.with_vars(keep)

    # -- text --------------------------------------------------------------
    def sorted_terms(self) -> list[tuple[Exponent, QuadExtScalar]]:
        """Terms in descending graded-lexicographic order."""
        return sorted(self._terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            neg = False
            if c.is_rational():
                r = c.rat
                neg = r < 0
                r = abs(r)
                coef = "" if (r == 1 and mono) else str(r)
            elif c.rat == 0:
                neg = c.irr < 0
                coef = str(-c if neg else c)
                if coef == "1":
                    coef = ""
            else:
                coef = f"({c})"
            body = "*".join(s for s in (coef, mono) if s)
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"MultiPoly({self.vars}, {str(self)!r})"


# -- derivatives, shifts, slicing ---------------------------------------------------

def directional_derivative(p: MultiPoly, u) -> MultiPoly:
    """Sum_i u_i dp/dx_i.

    ``u`` is either a sequence aligned with ``p.vars`` or a mapping from
    variable name to coefficient (missing names count as zero).
    """
    if isinstance(u, Mapping):
        unknown = [k for k in u if k not in p.vars]
        if unknown:
            raise ValueError(f"direction names {unknown} not among {p.vars}")
        items = [(k, as_scalar(c)) for k, c in u.items()]
    else:
        u = list(u)
        if len(u) != len(p.vars):
            raise ValueError(f"direction has length {len(u)}, polynomial has {len(p.vars)} variables")
        items = [(v, as_scalar(c)) for v, c in zip(p.vars, u)]
    result = MultiPoly._from_clean(p.vars, {})
    for name, c in items:
        if c:
            result = result + p.partial(name).scale(c)
    return result


def shift_substitute(p: MultiPoly, var: str, param: str) -> MultiPoly:
    """``p - p[var := var + param]`` over the variable set extended by ``param``."""
    if param in p.vars:
        raise ValueError(f"parameter name {param!r} collides with a variable")
    if var not in p.vars:
        raise KeyError(f"unknown variable {var!r}")
    ext = p.with_vars(p.vars + (param,))
    shifted = ext.substitute(var, MultiPoly.variable(ext.vars, var) + MultiPoly.variable(ext.vars, param))
    return ext - shifted


def expand_in(p: MultiPoly, frozen: Iterable[str]) -> dict[Exponent, MultiPoly]:
    """Collect ``p`` by monomials in the ``frozen`` variables.

    Keys are exponent tuples over the frozen variables (in ``p.vars`` order);
    values are polynomials in the remaining (free) variables only.
    """
    frozen = set(frozen)
    unknown = frozen - set(p.vars)
    if unknown:
        raise KeyError(f"unknown variables {sorted(unknown)}")
    if frozen == set(p.vars):
        raise ValueError("at least one variable must stay free")
    fi = [i for i, v in enumerate(p.vars) if v in frozen]
    gi = [i for i, v in enumerate(p.vars) if v not in frozen]
    free_vars = tuple(p.vars[i] for i in gi)
    buckets: dict[Exponent, dict] = {}
    for e, c in p.items():
        key = tuple(e[i] for i in fi)
        buckets.setdefault(key, {})[tuple(e[i] for i in gi)] = c
    return {k: MultiPoly._from_clean(free_vars, t) for k, t in buckets.items()}


def reassemble(parts: Mapping[Exponent, MultiPoly], frozen: Sequence[str], variables: Sequence[str]) -> MultiPoly:
    """Inverse of :func:`expand_in`."""
    fz = [v for v in variables if v in set(frozen)]
    total = MultiPoly.zero(variables)
    for key, q in parts.items():
        mono = MultiPoly.monomial(fz, key)
        total = total + mono.with_vars(variables) * q.with_vars(variables)
    return total


# -- monomial bases ------------------------------------------------------------

def monomial_basis(nvars: int, degree: int) -> list[Exponent]:
    """All exponent vectors of total degree <= ``degree``, graded then lexicographic."""
    basis: list[Exponent] = []
    for d in range(degree + 1):
        block = set()
        for combo in combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            block.add(tuple(e))
        basis.extend(sorted(block, reverse=True))
    return basis


def basis_size(nvars: int, degree: int) -> int:
    return comb(nvars + degree, degree)


def coefficient_vector(p: MultiPoly, basis: Sequence[Exponent]) -> list[QuadExtScalar]:
    index = {e: i for i, e in enumerate(basis)}
    vec = [ZERO] * len(basis)
    for e, c in p.items():
        if e not in index:
            raise ValueError(f"monomial {e} outside the degree bound")
        vec[index[e]] = c
    return vec


def from_coefficient_vector(variables: Sequence[str], basis: Sequence[Exponent], vec) -> MultiPoly:
    return MultiPoly(variables, {e: c for e, c in zip(basis, vec) if c})
