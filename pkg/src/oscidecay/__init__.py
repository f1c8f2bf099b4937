"""Exact nondegeneracy tests, decay certificates and numerical decay estimates
for multilinear oscillatory integrals with quadratic-surd coefficients."""

from .scalar import QuadExtScalar
from .poly import MultiPoly
from .parser import PolyParseError, parse_operator, parse_polynomial, parse_scalar
from .nondegeneracy import (
    DiffOperator,
    NotAnAnnihilatorError,
    ProjectionSystem,
    annihilator_witness,
    degeneracy_decompose,
    general_position,
)
from .uniformity import decide_family, difference_phase_check, hyp_check
from .strategy import Functional, analyze_freezing, enumerate_strategies, survey, validate_certificate
from .quadrature import FactorSpec, CutoffSpec, QuadConfig, decay_exponent, oscillatory_integral
from .problem import Problem, ProblemError, load_preset, load_problem, parse_problem

__version__ = "0.1.0"

__all__ = [
    "QuadExtScalar", "MultiPoly", "PolyParseError", "parse_operator", "parse_polynomial", "parse_scalar",
    "DiffOperator", "NotAnAnnihilatorError", "ProjectionSystem", "annihilator_witness",
    "degeneracy_decompose", "general_position", "decide_family", "difference_phase_check", "hyp_check",
    "Functional", "analyze_freezing", "enumerate_strategies", "survey", "validate_certificate",
    "FactorSpec", "CutoffSpec", "QuadConfig", "decay_exponent", "oscillatory_integral",
    "Problem", "ProblemError", "load_preset", "load_problem", "parse_problem",
]
