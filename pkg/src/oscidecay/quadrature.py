"""Numerical evaluation of oscillatory multilinear functionals and decay fits.

Quadrature is composite tensor Gauss-Legendre over the support of a product
bump cutoff.  Panel counts per axis come from a bound on the phase gradient
and are then doubled until two successive values agree.  Everything here is
double precision; the certificate logic elsewhere stays exact.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .poly import MultiPoly

MAX_POINTS = 2 ** 27


class ConvergenceError(RuntimeError):
    """Refinement did not settle; carries the last two iterates."""

    def __init__(self, message: str, iterates=(), lam=None):
        super().__init__(message)
        self.iterates = tuple(iterates)
        self.lam = lam


class DecayEvaluationError(RuntimeError):
    def __init__(self, lam: float, cause: Exception):
        super().__init__(f"evaluation failed at lambda = {lam:g}: {cause}")
        self.lam = lam
        self.cause = cause


# -- factor and cutoff descriptions -----------------------------------------------

GAUSSIAN = "gaussian"
TRIG_POLY = "trig-poly"
CONSTANT_ONE = "constant-one"


@dataclass(frozen=True)
class FactorSpec:
    """A bounded real function of one variable.

    ``gaussian``: ``exp(-((s - center) / width)^2)``.
    ``trig-poly``: ``sum_k a_k cos(k s) + b_k sin(k s)`` with ``coeffs[k] = (a_k, b_k)``.
    ``constant-one``: 1.
    ``scale`` multiplies whichever of these is chosen.
    """

    kind: str = CONSTANT_ONE
    center: float = 0.0
    width: float = 1.0
    coeffs: tuple[tuple[float, float], ...] = ()
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in (GAUSSIAN, TRIG_POLY, CONSTANT_ONE):
            raise ValueError(f"unknown factor kind {self.kind!r}")
        if self.kind == GAUSSIAN and not self.width > 0:
            raise ValueError("gaussian width must be positive")
        coeffs = tuple((float(a), float(b)) for a, b in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def gaussian(cls, center=0.0, width=1.0, scale=1.0) -> FactorSpec:
        return cls(GAUSSIAN, float(center), float(width), scale=float(scale))

    @classmethod
    def trig_poly(cls, coeffs, scale=1.0) -> FactorSpec:
        return cls(TRIG_POLY, coeffs=tuple(coeffs), scale=float(scale))

    @classmethod
    def constant_one(cls, scale=1.0) -> FactorSpec:
        return cls(CONSTANT_ONE, scale=float(scale))

    def scaled(self, a: float) -> FactorSpec:
        return FactorSpec(self.kind, self.center, self.width, self.coeffs, self.scale * a)

    def __call__(self, s: np.ndarray) -> np.ndarray:
        if self.kind == GAUSSIAN:
            out = np.exp(-np.square((s - self.center) / self.width))
        elif self.kind == TRIG_POLY:
            out = np.zeros_like(s)
            for k, (a, b) in enumerate(self.coeffs):
                if a:
                    out += a * np.cos(k * s)
                if b:
                    out += b * np.sin(k * s)
        else:
            out = np.ones_like(s)
        return out * self.scale if self.scale != 1.0 else out


def bump(t: np.ndarray) -> np.ndarray:
    """``exp(1 - 1/(1 - t^2))`` on ``|t| < 1``, zero elsewhere."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    ti = t[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - ti * ti))
    return out


@dataclass(frozen=True)
class CutoffSpec:
    """Product bump ``prod_i bump(x_i / r_i)`` supported on ``prod_i [-r_i, r_i]``."""

    radii: tuple[float, ...]

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if not radii or any(not r > 0 for r in radii):
            raise ValueError("cutoff radii must be positive")
        object.__setattr__(self, "radii", radii)

    @classmethod
    def uniform(cls, m: int, radius: float = 1.0) -> CutoffSpec:
        return cls((radius,) * m)

    def __call__(self, X: np.ndarray) -> np.ndarray:
        out = np.ones(X.shape[0])
        for i, r in enumerate(self.radii):
            out *= bump(X[:, i] / r)
        return out


@dataclass(frozen=True)
class QuadConfig:
    rel_tol: float = 1e-4
    abs_tol: float = 0.0
    nodes_per_panel: int = 4
    min_panels: int = 2
    max_refinements: int = 10
    max_points: int = MAX_POINTS
    chunk_size: int = 1 << 18
    workers: int = 1
    gradient_samples: int = 4096

    def __post_init__(self):
        if self.nodes_per_panel < 1 or self.min_panels < 1:
            raise ValueError("panel counts must be positive")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")


# -- numeric phase -------------------------------------------------------------------

class NumericPhase:
    """Float evaluation of a :class:`MultiPoly` on an ``(N, m)`` array of points."""

    def __init__(self, p: MultiPoly, variables: Sequence[str]):
        p = p.with_vars(tuple(variables))
        items = p.sorted_terms()
        self.m = len(variables)
        self.exps = np.array([e for e, _ in items], dtype=int).reshape(len(items), self.m)
        self.coeffs = np.array([float(c) for _, c in items], dtype=float)

    def __call__(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros(X.shape[0])
        for e, c in zip(self.exps, self.coeffs):
            term = np.full(X.shape[0], c)
            for i, k in enumerate(e):
                if k:
                    term *= X[:, i] ** k
            out += term
        return out


def gradient_bounds(p: MultiPoly, variables: Sequence[str], radii: Sequence[float],
                    samples: int = 4096) -> list[float]:
    """Max of ``|d_i P|`` over a sample grid of the box (endpoints included)."""
    m = len(variables)
    per_axis = max(3, int(round(samples ** (1.0 / m))))
    axes = [np.linspace(-r, r, per_axis) for r in radii]
    X = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    out = []
    for name in variables:
        d = p.with_vars(tuple(variables)).partial(name)
        out.append(float(np.max(np.abs(NumericPhase(d, variables)(X)))) if not d.is_zero() else 0.0)
    return out


def panel_counts(lam: float, grads: Sequence[float], radii: Sequence[float], min_panels: int) -> list[int]:
    """Smallest counts with ``|lam| * G_i * (2 r_i / n_i) <= pi / 2``."""
    return [max(min_panels, math.ceil(4.0 * r * abs(lam) * g / math.pi)) for g, r in zip(grads, radii)]


# -- tensor rule ----------------------------------------------------------------------

def _axis_rule(radius: float, panels: int, nodes: int):
    x0, w0 = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(-radius, radius, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    x = (mid[:, None] + half[:, None] * x0).ravel()
    w = (half[:, None] * w0).ravel()
    return x, w * bump(x / radius)


def pairwise_sum(values: list):
    """Fixed-shape tree summation (deterministic for a given list length)."""
    vals = list(values)
    if not vals:
        return 0j
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


@dataclass(frozen=True)
class _Integrand:
    phase: NumericPhase
    vectors: np.ndarray          # (n, m)
    factors: tuple[FactorSpec, ...]
    lam: float

    def __call__(self, X: np.ndarray) -> np.ndarray:
        amp = np.ones(X.shape[0])
        for v, f in zip(self.vectors, self.factors):
            if f.kind == CONSTANT_ONE and f.scale == 1.0:
                continue
            amp *= f(X @ v)
        if self.lam == 0:
            return amp.astype(complex)
        return amp * np.exp(1j * self.lam * self.phase(X))


def tensor_quadrature(integrand: Callable[[np.ndarray], np.ndarray], radii: Sequence[float],
                      panels: Sequence[int], cfg: QuadConfig) -> complex:
    """Composite Gauss-Legendre rule with the bump cutoff folded into the weights."""
    rules = [_axis_rule(r, n, cfg.nodes_per_panel) for r, n in zip(radii, panels)]
    shape = tuple(len(x) for x, _ in rules)
    total = math.prod(shape)
    if total > cfg.max_points:
        raise ConvergenceError(f"quadrature needs {total} points, above the cap {cfg.max_points}")
    starts = list(range(0, total, cfg.chunk_size))

    def chunk(start: int) -> complex:
        idx = np.unravel_index(np.arange(start, min(start + cfg.chunk_size, total)), shape)
        X = np.stack([rules[i][0][k] for i, k in enumerate(idx)], axis=1)
        w = np.ones(X.shape[0])
        for i, k in enumerate(idx):
            w *= rules[i][1][k]
        return complex(np.sum(w * integrand(X)))

    if cfg.workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(chunk, starts))
    else:
        parts = [chunk(s) for s in starts]
    return pairwise_sum(parts)


@dataclass(frozen=True)
class Evaluation:
    value: complex
    panels: tuple[int, ...]
    points: int
    refinements: int
    previous: complex | None = None


def _close(a: complex, b: complex, cfg: QuadConfig) -> bool:
    diff = abs(a - b)
    return diff <= cfg.rel_tol * max(abs(a), abs(b)) or diff <= cfg.abs_tol


def oscillatory_integral(phase: MultiPoly, variables: Sequence[str], vectors, factors: Sequence[FactorSpec],
                         cutoff: CutoffSpec, lam: float, cfg: QuadConfig = QuadConfig()) -> Evaluation:
    """``int exp(i lam P(x)) prod_j f_j(v_j . x) eta(x) dx`` in any dimension ``m >= 1``."""
    variables = tuple(variables)
    m = len(variables)
    vecs = np.array([[float(c) for c in v] for v in vectors], dtype=float).reshape(-1, m)
    if len(factors) != vecs.shape[0]:
        raise ValueError(f"{len(factors)} factor specs for {vecs.shape[0]} projections")
    if len(cutoff.radii) != m:
        raise ValueError(f"cutoff has {len(cutoff.radii)} radii for {m} coordinates")
    lam = float(lam)
    integrand = _Integrand(NumericPhase(phase, variables), vecs, tuple(factors), lam)
    grads = gradient_bounds(phase, variables, cutoff.radii, cfg.gradient_samples)
    panels = panel_counts(lam, grads, cutoff.radii, cfg.min_panels)
    prev = tensor_quadrature(integrand, cutoff.radii, panels, cfg)
    prev_prev = None
    for k in range(1, cfg.max_refinements + 1):
        panels = [2 * n for n in panels]
        try:
            cur = tensor_quadrature(integrand, cutoff.radii, panels, cfg)
        except ConvergenceError as exc:
            raise ConvergenceError(f"{exc} (lambda = {lam:g})", (prev,), lam) from None
        if _close(prev, cur, cfg):
            points = math.prod(n * cfg.nodes_per_panel for n in panels)
            return Evaluation(cur, tuple(panels), points, k, prev)
        prev_prev, prev = prev, cur
    raise ConvergenceError(
        f"no convergence within {cfg.max_refinements} refinements at lambda = {lam:g}: "
        f"last iterates {prev_prev!r}, {prev!r}", (prev_prev, prev), lam)


@dataclass(frozen=True)
class NumericProblem:
    """Phase and projections without the exact checks, e.g. for one-dimensional fixtures."""

    phase: MultiPoly
    variables: tuple[str, ...]
    vectors: tuple
    cutoff: tuple[float, ...] | None = None

    @property
    def m(self) -> int:
        return len(self.variables)


def _vectors(fn):
    return fn.vectors if isinstance(fn, NumericProblem) else fn.sys.vectors


def evaluate_functional(fn, factors: Sequence[FactorSpec], cutoff: CutoffSpec | None, lam: float,
                        cfg: QuadConfig = QuadConfig()) -> complex:
    """Converged value of the functional ``fn`` at frequency ``lam``."""
    if cutoff is None:
        cutoff = CutoffSpec(fn.cutoff) if fn.cutoff else CutoffSpec.uniform(fn.m)
    return oscillatory_integral(fn.phase, fn.variables, _vectors(fn), factors, cutoff, lam, cfg).value


# -- decay fits -------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayFit:
    lambdas: tuple[float, ...]
    values: tuple[complex, ...]
    magnitudes: tuple[float, ...]
    envelope: tuple[float, ...]
    epsilon: float
    slope: float
    intercept: float
    fit_quality: float
    evaluations: tuple = field(default=(), compare=False, repr=False)


def geometric_grid(lam_min: float, lam_max: float, steps: int) -> list[float]:
    if steps < 2:
        raise ValueError("a grid needs at least two points")
    return [float(x) for x in np.geomspace(lam_min, lam_max, steps)]


def validate_grid(grid: Sequence[float]) -> None:
    g = [float(x) for x in grid]
    if len(g) < 6:
        raise ValueError(f"grid has {len(g)} points; at least 6 are required")
    if g[0] < 1:
        raise ValueError(f"smallest lambda {g[0]:g} is below 1")
    ratios = [b / a for a, b in zip(g, g[1:])]
    if min(ratios) < math.sqrt(2) * (1 - 1e-9):
        raise ValueError(f"grid ratio {min(ratios):.4g} is below sqrt(2)")
    if max(ratios) / min(ratios) > 1 + 1e-6:
        raise ValueError("grid is not geometric")


def sliding_max(values: Sequence[float], window: int = 3) -> list[float]:
    """Centred running maximum; the window is truncated at both ends."""
    half = window // 2
    v = list(values)
    return [max(v[max(0, i - half): i + half + 1]) for i in range(len(v))]


def fit_envelope(lambdas: Sequence[float], magnitudes: Sequence[float]):
    """Least-squares line through (log lambda, log envelope): slope, intercept, R^2, envelope.

    Only samples with a full window enter the regression.  Truncated edge
    windows flatten a decaying envelope, whereas on a geometric grid the
    full windows merely shift it, which leaves the slope unchanged.
    """
    env = sliding_max(magnitudes)
    half = 1
    tiny = np.finfo(float).tiny
    x = np.log(np.asarray(lambdas, dtype=float))[half:len(env) - half]
    y = np.log(np.maximum(np.asarray(env, dtype=float), tiny))[half:len(env) - half]
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 1.0 if ss_tot <= 1e-300 * len(y) or ss_res <= 1e-24 * max(ss_tot, 1.0) else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2, env


def decay_fit_from_values(lambdas: Sequence[float], values: Sequence[complex], evaluations=()) -> DecayFit:
    mags = [abs(v) for v in values]
    slope, intercept, r2, env = fit_envelope(lambdas, mags)
    eps = max(0.0, -slope)
    return DecayFit(tuple(float(x) for x in lambdas), tuple(complex(v) for v in values), tuple(mags),
                    tuple(env), eps, slope, intercept, r2, tuple(evaluations))


def decay_sweep(evaluate: Callable[[float], Evaluation], grid: Sequence[float]) -> DecayFit:
    validate_grid(grid)
    evals = []
    for lam in grid:
        try:
            evals.append(evaluate(lam))
        except Exception as exc:
            raise DecayEvaluationError(lam, exc) from exc
    return decay_fit_from_values(grid, [e.value for e in evals], evals)


def decay_exponent(fn, factors: Sequence[FactorSpec], cutoff: CutoffSpec | None, grid: Sequence[float],
                   cfg: QuadConfig = QuadConfig()) -> DecayFit:
    """Fit ``|Lambda_lam| ~ C lam^(-epsilon)`` through the windowed-max envelope."""
    if cutoff is None:
        cutoff = CutoffSpec(fn.cutoff) if fn.cutoff else CutoffSpec.uniform(fn.m)
    return decay_sweep(
        lambda lam: oscillatory_integral(fn.phase, fn.variables, _vectors(fn), factors, cutoff, lam, cfg),
        grid)
