"""Exact rank, span membership and squared distance to a span over Q(sqrt(m)).

Vectors are plain sequences of :class:`QuadExtScalar`; a matrix is a list of
rows.  Everything is exact, so "zero" below always means exactly zero.
"""

from __future__ import annotations

from typing import Sequence

from .scalar import ZERO, QuadExtScalar, as_scalar

Vector = Sequence[QuadExtScalar]
ScalarMatrix = list[list[QuadExtScalar]]


def _vec(v) -> list[QuadExtScalar]:
    return [as_scalar(x) for x in v]


def dot(u: Vector, v: Vector) -> QuadExtScalar:
    acc = ZERO
    for a, b in zip(u, v):
        if a and b:
            acc = acc + a * b
    return acc


def _check_lengths(vectors) -> int | None:
    lengths = {len(v) for v in vectors}
    if len(lengths) > 1:
        raise ValueError(f"vectors have different lengths {sorted(lengths)}")
    return lengths.pop() if lengths else None


def row_reduce(rows: ScalarMatrix) -> tuple[ScalarMatrix, list[int]]:
    """Reduced row echelon form and pivot columns, by exact Gauss-Jordan elimination."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][col].inverse()
        m[r] = [x * inv if x else x for x in m[r]]
        prow = m[r]
        nz = [j for j in range(ncols) if prow[j]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                row = m[i]
                for j in nz:
                    row[j] = row[j] - f * prow[j]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(vs: Sequence[Vector]) -> int:
    """Dimension of the span of ``vs`` (0 for an empty list)."""
    vs = [_vec(v) for v in vs]
    if not vs:
        return 0
    _check_lengths(vs)
    return len(row_reduce(vs)[1])


def determinant(rows: Sequence[Vector]) -> QuadExtScalar:
    """Exact determinant by cofactor expansion; intended for small matrices."""
    rows = [_vec(r) for r in rows]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return as_scalar(1)
    if n == 1:
        return rows[0][0]
    total = ZERO
    for j, a in enumerate(rows[0]):
        if a:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            term = a * determinant(minor)
            total = total + term if j % 2 == 0 else total - term
    return total


class SpanSolver:
    """Precomputed elimination data for repeated queries against one span.

    Membership uses the row operations that bring the basis matrix to reduced
    echelon form; distances use an exact (unnormalised) Gram-Schmidt basis.
    """

    def __init__(self, basis: Sequence[Vector]):
        self.basis = [_vec(b) for b in basis]
        self.dim = _check_lengths(self.basis) or 0
        k = len(self.basis)
        n = self.dim
        # augmented [B | I] with B the n x k matrix whose columns are basis vectors
        aug = [[self.basis[j][i] for j in range(k)] + [as_scalar(int(i == c)) for c in range(n)]
               for i in range(n)]
        red, piv = row_reduce(aug) if n else ([], [])
        self.pivots = [p for p in piv if p < k]
        self.rank = len(self.pivots)
        self._transform = [row[k:] for row in red]
        self._orth: list[tuple[list[QuadExtScalar], QuadExtScalar]] = []
        for j in self.pivots:
            w = list(self.basis[j])
            for u, uu in self._orth:
                c = dot(w, u) / uu
                if c:
                    w = [a - c * b for a, b in zip(w, u)]
            self._orth.append((w, dot(w, w)))

    def solve(self, target: Vector) -> list[QuadExtScalar] | None:
        t = _vec(target)
        if len(t) != self.dim:
            raise ValueError("target length does not match basis vectors")
        s = [dot(row, t) for row in self._transform]
        if any(s[i] for i in range(self.rank, len(s))):
            return None
        coeffs = [ZERO] * len(self.basis)
        for i, j in enumerate(self.pivots):
            coeffs[j] = s[i]
        return coeffs

    def residual(self, target: Vector) -> list[QuadExtScalar]:
        """Component of ``target`` orthogonal to the span."""
        r = _vec(target)
        if len(r) != self.dim:
            raise ValueError("target length does not match basis vectors")
        for u, uu in self._orth:
            c = dot(r, u) / uu
            if c:
                r = [a - c * b for a, b in zip(r, u)]
        return r

    def residual_norm_sq(self, target: Vector) -> QuadExtScalar:
        r = self.residual(target)
        return dot(r, r)


def solve_membership(target: Vector, basis: Sequence[Vector]) -> list[QuadExtScalar] | None:
    """Coefficients ``c`` with ``sum(c[j] * basis[j]) == target``, or None outside the span."""
    if not basis:
        return [] if not any(_vec(target)) else None
    _check_lengths(list(basis) + [target])
    return SpanSolver(basis).solve(target)


def residual_norm_sq(target: Vector, basis: Sequence[Vector]) -> QuadExtScalar:
    """Exact squared Euclidean distance from ``target`` to ``span(basis)``."""
    if not basis:
        t = _vec(target)
        return dot(t, t)
    _check_lengths(list(basis) + [target])
    return SpanSolver(basis).residual_norm_sq(target)
