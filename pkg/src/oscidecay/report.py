"""JSON and text rendering of verdicts, certificates and decay fits.

Exact values are written as ``{"rat": "p/q", "irr": "p/q", "m": m}`` meaning
``rat + irr * sqrt(m)``; they are never rendered as floats in the machine
block.  Numerical results (quadrature values, fits) are plain floats.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .nondegeneracy import DegeneracyVerdict, DiffOperator, GeneralPosition, Witness
from .poly import MultiPoly
from .quadrature import DecayFit
from .scalar import QuadExtScalar, as_scalar
from .strategy import (ANNIHILATOR, CAUCHY_SCHWARZ, DIRECT, GROUPED, DecayCertificate, FreezeAnalysis,
                       Rejection)
from .uniformity import DifferencePhase, UniformityVerdict

SCHEMA_ID = "oscidecay-report/1"


# -- exact values ------------------------------------------------------------------

def scalar_to_json(x) -> dict:
    x = as_scalar(x)
    return {"rat": str(x.rat), "irr": str(x.irr), "m": x.radicand}


def scalar_from_json(d: dict) -> QuadExtScalar:
    return QuadExtScalar(Fraction(d["rat"]), Fraction(d["irr"]), int(d["m"]))


def poly_to_json(p: MultiPoly) -> dict:
    return {
        "vars": list(p.vars),
        "terms": [{"exp": list(e), "coeff": scalar_to_json(c)} for e, c in p.sorted_terms()],
        "text": str(p),
    }


def poly_from_json(d: dict) -> MultiPoly:
    return MultiPoly(tuple(d["vars"]), {tuple(t["exp"]): scalar_from_json(t["coeff"]) for t in d["terms"]})


def operator_to_json(D: DiffOperator) -> dict:
    return {
        "vars": list(D.variables),
        "directions": [[scalar_to_json(c) for c in u] for u in D.directions],
        "text": str(D),
    }


def operator_from_json(d: dict) -> DiffOperator:
    return DiffOperator(tuple(d["vars"]), tuple(tuple(scalar_from_json(c) for c in u) for u in d["directions"]))


def _opt(f, x):
    return None if x is None else f(x)


# -- verdicts -------------------------------------------------------------------------

def degeneracy_to_json(v: DegeneracyVerdict) -> dict:
    return {
        "degenerate": v.degenerate,
        "components": None if v.components is None else [poly_to_json(p) for p in v.components],
        "distance_sq": _opt(scalar_to_json, v.distance_sq),
        "degree_bound": v.degree_bound,
    }


def gp_to_json(gp: GeneralPosition | None):
    if gp is None:
        return None
    return {"holds": gp.holds, "failing_subset": None if gp.failing_subset is None else list(gp.failing_subset)}


def uniformity_to_json(v: UniformityVerdict | None):
    if v is None:
        return None
    return {
        "status": v.status,
        "description": v.describe(),
        "parameters": list(v.parameters),
        "domain": str(v.domain),
        "coefficients": [poly_to_json(q) for q in v.coefficients],
        "gcd": _opt(poly_to_json, v.gcd),
        "root": _opt(scalar_to_json, v.root),
        "root_interval": None if v.root_interval is None else [str(x) for x in v.root_interval],
        "image": _opt(poly_to_json, v.image),
        "degeneracy": _opt(degeneracy_to_json, v.degeneracy),
    }


def difference_to_json(d: DifferencePhase) -> dict:
    return {
        "direction": d.direction,
        "parameter": d.parameter,
        "difference": poly_to_json(d.difference),
        "verdict": uniformity_to_json(d.verdict),
        "box_image": _opt(poly_to_json, d.box_image),
        "split": d.split,
    }


def witness_to_json(w: Witness | None):
    if w is None:
        return None
    return {"operator": operator_to_json(w.operator), "image": poly_to_json(w.image)}


def freeze_to_json(a: FreezeAnalysis) -> dict:
    return {
        "frozen": list(a.frozen),
        "free": list(a.free),
        "groups": [list(g) for g in a.groups],
        "passthrough": list(a.passthrough),
        "marginalized": [{"coordinate": w, "groups": list(g)} for w, g in a.marginalized],
        "reduced_vectors": None if a.reduced_sys is None else
        [[scalar_to_json(c) for c in v] for v in a.reduced_sys.vectors],
        "reduced_variables": None if a.reduced_sys is None else list(a.reduced_sys.variables),
        "count_ok": a.count_ok,
        "general_position": gp_to_json(a.general_position),
        "uniform": uniformity_to_json(a.uniform),
        "hyp": None if a.hyp is None else {"operator": operator_to_json(a.hyp.operator),
                                           "verdict": uniformity_to_json(a.hyp.verdict)},
        "reasons": list(a.reasons),
    }


def _evidence_to_json(cert: DecayCertificate):
    ev = cert.evidence
    if cert.route == GROUPED and ev is not None:
        return freeze_to_json(ev)
    if cert.route == CAUCHY_SCHWARZ and ev is not None:
        return {
            "count_ok": ev.count_ok,
            "general_position": gp_to_json(ev.general_position),
            "difference": difference_to_json(ev.difference),
            "witness": witness_to_json(ev.witness),
        }
    if cert.route == DIRECT and ev is not None:
        return {"n": ev.n, "m": ev.m, "general_position": gp_to_json(ev.general_position),
                "degeneracy": _opt(degeneracy_to_json, ev.degeneracy)}
    if cert.route == ANNIHILATOR and ev is not None:
        return {"witness": witness_to_json(ev),
                "note": "conditional on the L^infinity theorem's simple-nondegeneracy hypothesis"}
    return None


def certificate_to_json(cert: DecayCertificate) -> dict:
    return {
        "route": cert.route,
        "label": cert.label,
        "norms": list(cert.norms),
        "l2_count": cert.l2_count,
        "frozen": list(cert.frozen),
        "pivot": cert.pivot,
        "companion": cert.companion,
        "direction": cert.direction,
        "operator": _opt(operator_to_json, cert.operator),
        "evidence": _evidence_to_json(cert),
    }


def rejection_to_json(r: Rejection) -> dict:
    return {"route": r.route, "label": r.label, "reasons": list(r.reasons)}


def fit_to_json(fit: DecayFit) -> dict:
    return {
        "lambdas": list(fit.lambdas),
        "values": [{"re": v.real, "im": v.imag} for v in fit.values],
        "magnitudes": list(fit.magnitudes),
        "envelope": list(fit.envelope),
        "epsilon": fit.epsilon,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "fit_quality": fit.fit_quality,
    }


def fit_to_csv(fit: DecayFit) -> str:
    lines = ["lambda,re,im,abs"]
    for lam, v in zip(fit.lambdas, fit.values):
        lines.append(f"{lam!r},{v.real!r},{v.imag!r},{abs(v)!r}")
    return "\n".join(lines) + "\n"


def problem_to_json(problem) -> dict:
    fn = problem.functional
    return {
        "name": problem.name,
        "variables": list(fn.variables),
        "radicand": problem.radicand,
        "phase": poly_to_json(fn.phase),
        "degree_bound": fn.degree_bound,
        "factors": [[scalar_to_json(c) for c in v] for v in fn.sys.vectors],
    }


def make_report(command: str, problem, status: str, result: dict) -> dict:
    return {"schema": SCHEMA_ID, "command": command, "status": status,
            "problem": problem_to_json(problem), "result": result}


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False, sort_keys=False) + "\n"


# -- schema -----------------------------------------------------------------------------

_SCALAR = {
    "type": "object",
    "required": ["rat", "irr", "m"],
    "additionalProperties": False,
    "properties": {
        "rat": {"type": "string", "pattern": r"^-?\d+(/\d+)?$"},
        "irr": {"type": "string", "pattern": r"^-?\d+(/\d+)?$"},
        "m": {"type": "integer", "minimum": 2},
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": SCHEMA_ID,
    "type": "object",
    "required": ["schema", "command", "status", "problem", "result"],
    "properties": {
        "schema": {"const": SCHEMA_ID},
        "command": {"enum": ["check-degenerate", "general-position", "hyp-check", "diff-phase-check",
                             "strategy", "estimate-decay"]},
        "status": {"enum": ["positive", "negative"]},
        "problem": {
            "type": "object",
            "required": ["name", "variables", "phase", "degree_bound", "factors"],
            "properties": {
                "variables": {"type": "array", "items": {"type": "string"}},
                "phase": {"$ref": "#/$defs/poly"},
                "degree_bound": {"type": "integer", "minimum": 0},
                "factors": {"type": "array", "items": {"type": "array", "items": {"$ref": "#/$defs/scalar"}}},
            },
        },
        "result": {"type": "object"},
    },
    "$defs": {
        "scalar": _SCALAR,
        "poly": {
            "type": "object",
            "required": ["vars", "terms", "text"],
            "properties": {
                "vars": {"type": "array", "items": {"type": "string"}},
                "terms": {"type": "array", "items": {
                    "type": "object",
                    "required": ["exp", "coeff"],
                    "properties": {"exp": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                                   "coeff": {"$ref": "#/$defs/scalar"}},
                }},
                "text": {"type": "string"},
            },
        },
        "certificate": {
            "type": "object",
            "required": ["route", "label", "norms", "l2_count", "evidence"],
            "properties": {
                "route": {"enum": [DIRECT, GROUPED, CAUCHY_SCHWARZ, ANNIHILATOR]},
                "norms": {"type": "array", "items": {"enum": ["2", "inf"]}},
                "l2_count": {"type": "integer", "minimum": 0},
            },
        },
    },
}


# -- text rendering ---------------------------------------------------------------------

def _norm_text(norms) -> str:
    return "(" + ",".join("∞" if s == "inf" else s for s in norms) + ")"


def _coeff_prefix(c: QuadExtScalar) -> str:
    if c == 1:
        return ""
    if c == -1:
        return "-"
    text = str(c)
    if not c.is_rational() and c.rat != 0:
        text = f"({text})"
    return text + "*"


def identity_text(P: MultiPoly, components, forms) -> str:
    """``P = sum_j p_j(v_j . x)`` written out term by term."""
    parts = []
    for pj, lf in zip(components, forms):
        base = str(lf)
        if len(lf) > 1 or base.startswith("-"):
            base = f"({base})"
        for (k,), c in sorted(pj.items(), key=lambda t: -t[0][0]):
            if k == 0:
                parts.append(str(c))
                continue
            power = base if k == 1 else f"{base}^{k}"
            parts.append(_coeff_prefix(c) + power)
    rhs = " + ".join(parts).replace("+ -", "- ") if parts else "0"
    return f"{P} = {rhs}"


def render_text(report: dict) -> str:
    cmd = report["command"]
    prob = report["problem"]
    res = report["result"]
    out = [f"{cmd} on {prob['name']}: phase {prob['phase']['text']}, degree bound {prob['degree_bound']}"]
    if cmd == "check-degenerate":
        if res["degenerate"]:
            out.append("degenerate: P = sum_j p_j(v_j . x) with")
            for j, (c, form) in enumerate(zip(res["components"], res["forms"]), 1):
                out.append(f"  p_{j}(t) = {c['text']}    [v_{j} . x = {form}]")
            out.append(f"  identity: {res['identity']}")
        else:
            d = scalar_from_json(res["distance_sq"])
            out.append(f"nondegenerate: squared distance to the degenerate span = {d} (~{float(d):.6g})")
    elif cmd == "general-position":
        if res["holds"]:
            out.append("general position holds")
        else:
            out.append(f"general position fails on factors {res['failing_subset']}")
    elif cmd == "hyp-check":
        if res["operator"] is None:
            out.append(f"no operator in the search pool gives a uniformly positive D P, frozen {res['frozen']}")
            out.append(f"status: {report['status']}")
            return "\n".join(out) + "\n"
        out.append(f"operator {res['operator']['text']}, frozen {res['frozen']}")
        if res.get("annihilates_groups") is False:
            out.append("warning: the operator does not kill every grouped factor")
        v = res["verdict"]
        img = v["image"]["text"] if v["image"] else "?"
        out.append(f"D P = {img}")
        out.append(f"verdict: {v['description']}")
    elif cmd == "diff-phase-check":
        d = res["check"]
        out.append(f"pivot f{res['pivot']}, direction {d['direction']}")
        out.append(f"difference: {d['difference']['text']}")
        if d["box_image"] is not None:
            out.append(f"wave operator image: {d['box_image']['text']}")
        out.append(f"verdict on |{d['parameter']}| >= 1: {d['verdict']['description']}")
    elif cmd == "strategy":
        certs = res["certificates"]
        if not certs:
            out.append("no certificate found (this does not show that decay fails)")
        for k, c in enumerate(certs, 1):
            out.append(f"{k}. {c['label']}  norms {_norm_text(c['norms'])}  [{c['l2_count']} x L2]")
        if res["rejections"]:
            out.append("rejected routes:")
            for r in res["rejections"]:
                out.append(f"  {r['label']}: {'; '.join(r['reasons'])}")
    elif cmd == "estimate-decay":
        fit = res["fit"]
        out.append("lambda          |value|        envelope")
        for lam, mag, env in zip(fit["lambdas"], fit["magnitudes"], fit["envelope"]):
            out.append(f"{lam:<15.6g} {mag:<14.6e} {env:.6e}")
        out.append(f"epsilon = {fit['epsilon']:.4f} (slope {fit['slope']:.4f}, R^2 {fit['fit_quality']:.4f})")
    out.append(f"status: {report['status']}")
    return "\n".join(out) + "\n"
