"""Command-line front end: ``oscidecay <command> [problem.toml | --preset NAME] ...``.

Exit status: 0 for a positive verdict or a certificate, 1 for a negative
verdict or no certificate, 2 for input errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import report as rp
from .nondegeneracy import degeneracy_decompose, general_position
from .parser import PolyParseError, parse_operator
from .problem import PRESETS, Problem, ProblemError, load_preset, load_problem
from .quadrature import ConvergenceError, DecayEvaluationError, QuadConfig, decay_exponent, geometric_grid
from .strategy import analyze_freezing, find_hyp_witness, survey
from .uniformity import difference_phase_check, hyp_check

EXIT_POSITIVE, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2

# fitted exponents at or above this count as observed decay
DECAY_MARGIN = 0.05

COMMANDS = ("check-degenerate", "general-position", "hyp-check", "diff-phase-check", "strategy",
            "estimate-decay")


class InputError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="oscidecay",
                                 description="Decay certificates for multilinear oscillatory integrals.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("problem", nargs="?", help="problem file (TOML)")
        p.add_argument("--preset", choices=PRESETS, help="use a bundled problem instead of a file")
        p.add_argument("--phase", help="override the phase polynomial")
        p.add_argument("--degree-bound", type=int, help="degree bound d for the nondegeneracy tests")
        p.add_argument("--json", metavar="PATH", help="also write the JSON report here ('-' for stdout only)")

    common(sub.add_parser("check-degenerate", help="decide whether the phase is degenerate"))
    common(sub.add_parser("general-position", help="check general position of the projections"))
    p = sub.add_parser("hyp-check", help="uniform positivity of D P in the frozen coordinates")
    common(p)
    p.add_argument("--frozen", default=None, help="comma-separated frozen coordinates (default: last one)")
    p.add_argument("--operator", help="e.g. 'dx dy (dx - dy)'; default: searched")
    p = sub.add_parser("diff-phase-check", help="uniform nondegeneracy of P(x) - P(x + zeta e)")
    common(p)
    p.add_argument("--pivot", type=int, default=1, help="1-based index of the peeled factor")
    p.add_argument("--direction", help="coordinate to shift (default: first)")
    p = sub.add_parser("strategy", help="enumerate and rank decay certificates")
    common(p)
    p.add_argument("--max-freeze", type=int, help="largest frozen set tried (default m - 2)")
    p = sub.add_parser("estimate-decay", help="numerical decay exponent over a lambda sweep")
    common(p)
    p.add_argument("--lambda-min", type=float, default=16.0)
    p.add_argument("--lambda-max", type=float, default=512.0)
    p.add_argument("--lambda-steps", type=int, default=6)
    p.add_argument("--rel-tol", type=float, default=1e-4)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv", metavar="PATH", help="write lambda, re, im, abs rows here")
    return ap


def _load(args) -> Problem:
    if args.preset and args.problem:
        raise InputError("give either a problem file or --preset, not both")
    if args.preset:
        return load_preset(args.preset, args.phase, args.degree_bound)
    if not args.problem:
        raise InputError("a problem file or --preset is required")
    return load_problem(args.problem, args.phase, args.degree_bound)


def _coord(problem: Problem, name: str) -> str:
    if name not in problem.variables:
        raise InputError(f"unknown coordinate {name!r}; variables are {', '.join(problem.variables)}")
    return name


def cmd_check_degenerate(problem: Problem, args):
    fn = problem.functional
    v = degeneracy_decompose(fn.phase, fn.sys, fn.degree_bound)
    result = rp.degeneracy_to_json(v)
    forms = [str(fn.sys.form(j)) for j in range(1, fn.n + 1)]
    result["forms"] = forms
    result["identity"] = None
    if v.degenerate:
        result["identity"] = rp.identity_text(fn.phase, v.components,
                                              [fn.sys.form(j) for j in range(1, fn.n + 1)])
        result["residual"] = rp.poly_to_json(fn.phase - v.reconstruct(fn.sys))
    # degenerate phases admit no decay estimate: that is the negative outcome
    return ("negative" if v.degenerate else "positive"), result


def cmd_general_position(problem: Problem, args):
    gp = general_position(problem.functional.sys)
    return ("positive" if gp.holds else "negative"), rp.gp_to_json(gp)


def cmd_hyp_check(problem: Problem, args):
    fn = problem.functional
    frozen = [s.strip() for s in args.frozen.split(",") if s.strip()] if args.frozen else [fn.variables[-1]]
    frozen = [_coord(problem, s) for s in frozen]
    if args.operator:
        try:
            D = parse_operator(args.operator, fn.variables, problem.radicand)
        except PolyParseError as exc:
            raise ProblemError(f"operator: {exc.message}", 1, exc.position + 1, "--operator") from None
    else:
        found = find_hyp_witness(fn, frozen)
        if found is None:
            result = {"frozen": frozen, "operator": None, "searched": True,
                      "verdict": None, "annihilates_groups": None}
            return "negative", result
        D = found.operator
    try:
        verdict = hyp_check(fn.phase, frozen, D)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    a = analyze_freezing(fn, frozen) if len(frozen) <= fn.m - 2 else None
    kills = None
    if a is not None and a.reduced_sys is not None:
        kills = all(D.kills(tuple(v) + tuple(0 for _ in frozen)) for v in _lift_reps(a, fn))
    result = {"frozen": frozen, "operator": rp.operator_to_json(D), "searched": not args.operator,
              "verdict": rp.uniformity_to_json(verdict), "annihilates_groups": kills}
    return ("positive" if verdict.positive else "negative"), result


def _lift_reps(a, fn):
    """Group representatives as ambient vectors with zeros on the frozen coordinates."""
    for g in a.groups:
        v = fn.sys.vectors[g[0] - 1]
        yield tuple(c if name not in a.frozen else 0 for name, c in zip(fn.variables, v))


def cmd_diff_phase(problem: Problem, args):
    fn = problem.functional
    direction = _coord(problem, args.direction or fn.variables[0])
    if not 1 <= args.pivot <= fn.n:
        raise InputError(f"--pivot must be between 1 and {fn.n}")
    rest = fn.sys.without(args.pivot)
    check = difference_phase_check(fn.phase, direction, rest, fn.degree_bound)
    result = {"pivot": args.pivot,
              "pivot_depends_on_direction": bool(fn.sys.vectors[args.pivot - 1][fn.variables.index(direction)]),
              "check": rp.difference_to_json(check)}
    return ("positive" if check.positive else "negative"), result


def cmd_strategy(problem: Problem, args):
    fn = problem.functional
    mf = args.max_freeze if args.max_freeze is not None else fn.m - 2
    if mf < 0 or mf > fn.m - 2:
        raise InputError(f"--max-freeze must be between 0 and {fn.m - 2}")
    s = survey(fn, mf)
    result = {"max_freeze": mf,
              "certificates": [rp.certificate_to_json(c) for c in s.certificates],
              "rejections": [rp.rejection_to_json(r) for r in s.rejections]}
    return ("positive" if s.certificates else "negative"), result


def cmd_estimate_decay(problem: Problem, args):
    if problem.factor_specs is None:
        raise InputError("estimate-decay needs [[numerics.factors]] tables in the problem file")
    if args.lambda_steps < 6:
        raise InputError("--lambda-steps must be at least 6")
    grid = geometric_grid(args.lambda_min, args.lambda_max, args.lambda_steps)
    cfg = QuadConfig(rel_tol=args.rel_tol, workers=max(1, args.workers))
    try:
        fit = decay_exponent(problem.functional, problem.factor_specs, problem.cutoff, grid, cfg)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    result = {"fit": rp.fit_to_json(fit), "rel_tol": args.rel_tol, "decay_margin": DECAY_MARGIN}
    if args.csv:
        Path(args.csv).write_text(rp.fit_to_csv(fit), encoding="utf-8")
    return ("positive" if fit.epsilon >= DECAY_MARGIN else "negative"), result


HANDLERS = {
    "check-degenerate": cmd_check_degenerate,
    "general-position": cmd_general_position,
    "hyp-check": cmd_hyp_check,
    "diff-phase-check": cmd_diff_phase,
    "strategy": cmd_strategy,
    "estimate-decay": cmd_estimate_decay,
}


def run_command(command: str, problem: Problem, args) -> tuple[dict, int]:
    status, result = HANDLERS[command](problem, args)
    report = rp.make_report(command, problem, status, result)
    return report, (EXIT_POSITIVE if status == "positive" else EXIT_NEGATIVE)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else 0
    try:
        problem = _load(args)
        report, code = run_command(args.command, problem, args)
    except ProblemError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except InputError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (ConvergenceError, DecayEvaluationError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_NEGATIVE
    stdout.write(rp.render_text(report))
    if args.json:
        text = rp.dumps(report)
        if args.json == "-":
            stdout.write(text)
        else:
            Path(args.json).write_text(text, encoding="utf-8")
    return code


if __name__ == "__main__":
    sys.exit(main())
