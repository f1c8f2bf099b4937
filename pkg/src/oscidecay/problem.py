"""Problem files: TOML with a phase expression, factor vectors and optional numerics.

Example::

    name = "lightcone6"
    variables = ["x", "y", "z"]
    radicand = 2                  # optional; fixed by the first sqrt otherwise
    phase = "x^2*y + 2*x*y*z"
    degree_bound = 3              # optional; defaults to deg(phase)
    factors = [["0", "1", "1"], ["0", "1", "-1"], ...]

    [cutoff]
    radii = [1.0, 1.0, 1.0]

    [[numerics.factors]]          # one table per factor, for estimate-decay
    kind = "gaussian"
    center = 0.0
    width = 1.0

Factor entries are scalar expressions (``"sqrt(2)"``, ``"-1/2"``) or plain numbers.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .nondegeneracy import ProjectionSystem
from .parser import PolyParseError, parse_polynomial, parse_scalar
from .quadrature import CutoffSpec, FactorSpec
from .strategy import Functional

PRESETS = ("lightcone6", "flex1", "flex2", "planar3")


class ProblemError(ValueError):
    """Invalid problem file, with an optional 1-based line and column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None, source: str = ""):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
        prefix = f"{source}: " if source else ""
        super().__init__(f"{prefix}{where}: {message}" if where else f"{prefix}{message}")


@dataclass(frozen=True)
class Problem:
    name: str
    functional: Functional
    radicand: int | None
    cutoff: CutoffSpec
    factor_specs: tuple[FactorSpec, ...] | None
    source: str = ""

    @property
    def variables(self) -> tuple[str, ...]:
        return self.functional.variables


def _locate_key(text: str, key: str) -> tuple[int, int] | None:
    """Line and column (1-based) where the string value of ``key`` starts."""
    for i, line in enumerate(text.splitlines(), 1):
        m = re.match(rf'\s*{re.escape(key)}\s*=\s*(["\'])', line)
        if m:
            return i, m.end(1) + 1
    return None


def _locate_text(text: str, needle: str) -> tuple[int, int] | None:
    for i, line in enumerate(text.splitlines(), 1):
        for quote in ('"', "'"):
            k = line.find(quote + needle + quote)
            if k >= 0:
                return i, k + 2
    return None


def _scalar(entry, radicand, text, source):
    try:
        if isinstance(entry, bool):
            raise ValueError("booleans are not scalars")
        if isinstance(entry, int):
            return parse_scalar(str(entry), radicand)
        if isinstance(entry, float):
            if not entry.is_integer():
                raise ValueError(f"write {entry!r} as an exact fraction string")
            return parse_scalar(str(int(entry)), radicand)
        return parse_scalar(str(entry), radicand)
    except PolyParseError as exc:
        loc = _locate_text(text, str(entry))
        if loc:
            raise ProblemError(exc.message, loc[0], loc[1] + exc.position, source) from None
        raise ProblemError(f"factor entry {entry!r}: {exc}", source=source) from None
    except ValueError as exc:
        loc = _locate_text(text, str(entry))
        raise ProblemError(f"factor entry {entry!r}: {exc}", *(loc or (None, None)), source) from None


def _factor_spec(d: dict, k: int, source: str) -> FactorSpec:
    try:
        kind = d.get("kind", "constant-one")
        if kind == "gaussian":
            return FactorSpec.gaussian(d.get("center", 0.0), d.get("width", 1.0), d.get("scale", 1.0))
        if kind == "trig-poly":
            return FactorSpec.trig_poly([tuple(c) for c in d.get("coeffs", [])], d.get("scale", 1.0))
        if kind == "constant-one":
            return FactorSpec.constant_one(d.get("scale", 1.0))
        raise ValueError(f"unknown kind {kind!r}")
    except (TypeError, ValueError) as exc:
        raise ProblemError(f"numerics factor {k}: {exc}", source=source) from None


def parse_problem(text: str, source: str = "", phase: str | None = None,
                  degree_bound: int | None = None) -> Problem:
    """Build a :class:`Problem`; ``phase`` and ``degree_bound`` override the file."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+), column (\d+)", str(exc))
        line, col = (int(m.group(1)), int(m.group(2))) if m else (None, None)
        msg = re.sub(r"\s*\(at line \d+, column \d+\)", "", str(exc))
        raise ProblemError(msg, line, col, source) from None

    for key in ("variables", "factors"):
        if key not in data:
            raise ProblemError(f"missing key {key!r}", source=source)
    variables = data["variables"]
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise ProblemError("'variables' must be a list of names", source=source)
    radicand = data.get("radicand")
    if radicand is not None and (not isinstance(radicand, int) or radicand < 2):
        raise ProblemError("'radicand' must be an integer >= 2", source=source)

    vectors = []
    for j, row in enumerate(data["factors"], 1):
        if not isinstance(row, list) or len(row) != len(variables):
            raise ProblemError(f"factor {j} must list {len(variables)} entries", source=source)
        vectors.append([_scalar(c, radicand, text, source) for c in row])
    try:
        sys_ = ProjectionSystem(tuple(variables), vectors)
    except ValueError as exc:
        raise ProblemError(str(exc), source=source) from None
    if radicand is None:
        found = {c.radicand for v in sys_.vectors for c in v if not c.is_rational()}
        radicand = found.pop() if found else None

    phase_text = phase if phase is not None else data.get("phase")
    if phase_text is None:
        raise ProblemError("missing key 'phase'", source=source)
    try:
        P = parse_polynomial(phase_text, variables, radicand)
    except PolyParseError as exc:
        if phase is None:
            loc = _locate_key(text, "phase")
            if loc:
                raise ProblemError(exc.message, loc[0], loc[1] + exc.position, source) from None
        raise ProblemError(f"phase: {exc.message}", 1, exc.position + 1, "--phase") from None
    except ValueError as exc:
        raise ProblemError(f"phase: {exc}", source=source) from None

    d_file = data.get("degree_bound")
    if degree_bound is not None:
        d = degree_bound
    elif d_file is not None:
        d = max(int(d_file), P.degree()) if phase is not None else int(d_file)
    else:
        d = max(P.degree(), 1)
    if d < P.degree():
        raise ProblemError(f"degree bound {d} is below deg P = {P.degree()}", source=source)

    cut = data.get("cutoff", {})
    radii = cut.get("radii", [1.0] * len(variables))
    if len(radii) != len(variables):
        raise ProblemError(f"cutoff needs {len(variables)} radii", source=source)
    try:
        cutoff = CutoffSpec(tuple(radii))
    except (TypeError, ValueError) as exc:
        raise ProblemError(f"cutoff: {exc}", source=source) from None

    specs = None
    num = data.get("numerics", {})
    if "factors" in num:
        specs = tuple(_factor_spec(f, k, source) for k, f in enumerate(num["factors"], 1))
        if len(specs) != sys_.n:
            raise ProblemError(f"numerics lists {len(specs)} factors for {sys_.n} projections", source=source)

    name = data.get("name", Path(source).stem if source else "problem")
    fn = Functional(sys_, P, d, cutoff.radii, name)
    return Problem(name, fn, radicand, cutoff, specs, source)


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ProblemError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return resources.files("oscidecay.presets").joinpath(f"{name}.toml").read_text(encoding="utf-8")


def load_preset(name: str, phase: str | None = None, degree_bound: int | None = None) -> Problem:
    return parse_problem(preset_text(name), f"preset:{name}", phase, degree_bound)


def load_problem(path, phase: str | None = None, degree_bound: int | None = None) -> Problem:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemError(f"cannot read problem file: {exc.strerror}", source=str(p)) from None
    return parse_problem(text, str(p), phase, degree_bound)
