import io
import json
import os
from fractions import Fraction
from pathlib import Path

import jsonschema
import pytest

from oscidecay.cli import main
from oscidecay.report import REPORT_SCHEMA, SCHEMA_ID, scalar_from_json

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("OSCIDECAY_UPDATE_GOLDEN") == "1"

# (preset, command, extra flags, expected exit status)
MATRIX = [
    ("lightcone6", "check-degenerate", [], 0),
    ("lightcone6", "general-position", [], 0),
    ("lightcone6", "hyp-check", [], 0),
    ("lightcone6", "diff-phase-check", [], 1),
    ("lightcone6", "strategy", [], 0),
    ("flex1", "check-degenerate", [], 0),
    ("flex1", "general-position", [], 1),
    ("flex1", "hyp-check", ["--frozen", "z,w"], 0),
    ("flex1", "strategy", [], 0),
    ("flex2", "general-position", [], 1),
    ("flex2", "strategy", [], 0),
    ("planar3", "check-degenerate", [], 0),
    ("planar3", "general-position", [], 0),
    ("planar3", "strategy", [], 0),
]

PHASE_CASES = [
    ("x^3", "strategy", [], 0),
    ("x^3", "hyp-check", ["--operator", "dx dy (dx - dy)"], 1),
    ("x^2*y^2", "strategy", [], 0),
    ("x^2*y^2", "diff-phase-check", [], 0),
    ("4*x*y + 4*y*z", "check-degenerate", [], 1),
]


def run(argv, tmp_path=None):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def run_json(argv, tmp_path):
    path = tmp_path / "report.json"
    code, out, err = run(argv + ["--json", str(path)])
    return code, out, err, path.read_text(encoding="utf-8")


def check_golden(name, text):
    path = GOLDEN / f"{name}.json"
    if UPDATE:
        path.write_text(text, encoding="utf-8")
    assert path.exists(), f"missing golden file {path.name}; rerun with OSCIDECAY_UPDATE_GOLDEN=1"
    assert text == path.read_text(encoding="utf-8"), f"golden mismatch for {name}"


def golden_name(*parts):
    return "__".join(p.replace("*", "").replace("^", "").replace(" ", "").replace("+", "p") for p in parts)


@pytest.mark.parametrize("preset, command, flags, status", MATRIX)
def test_preset_matrix(preset, command, flags, status, tmp_path):
    code, out, err, text = run_json([command, "--preset", preset] + flags, tmp_path)
    assert code == status, err
    report = json.loads(text)
    jsonschema.validate(report, REPORT_SCHEMA)
    assert report["schema"] == SCHEMA_ID and report["command"] == command
    assert report["status"] == ("positive" if status == 0 else "negative")
    assert out.endswith(f"status: {report['status']}\n")
    check_golden(golden_name(preset, command), text)


@pytest.mark.parametrize("phase, command, flags, status", PHASE_CASES)
def test_phase_overrides(phase, command, flags, status, tmp_path):
    code, out, err, text = run_json([command, "--preset", "lightcone6", "--phase", phase] + flags, tmp_path)
    assert code == status, err
    jsonschema.validate(json.loads(text), REPORT_SCHEMA)
    check_golden(golden_name("lightcone6", phase, command), text)


def test_strategy_examples():
    code, out, _ = run(["strategy", "--preset", "lightcone6", "--phase", "x^2*y + 2*x*y*z"])
    assert code == 0
    assert "1. grouped{z}  norms (2,∞,2,∞,2,∞)" in out
    code, out, _ = run(["strategy", "--preset", "lightcone6", "--phase", "x^3"])
    assert code == 0 and "1. cauchy-schwarz(f1,x)  norms (2,2,∞,∞,∞,∞)" in out


def test_five_square_output():
    code, out, _ = run(["check-degenerate", "--preset", "lightcone6", "--phase", "4*x*y + 4*y*z"])
    assert code == 1
    assert ("identity: 4*x*y + 4*y*z = -2*(y - z)^2 - (x + z)^2 - (x - z)^2"
            " + (x + y + sqrt(2)*z)^2 + (x + y - sqrt(2)*z)^2") in out


def test_strategy_is_byte_identical(tmp_path):
    runs = [run_json(["strategy", "--preset", "lightcone6"], tmp_path)[1:] for _ in range(3)]
    assert runs[0] == runs[1] == runs[2]


def test_exact_values_never_floats(tmp_path):
    _, _, _, text = run_json(["check-degenerate", "--preset", "lightcone6", "--phase", "x^3"], tmp_path)
    report = json.loads(text)
    d = report["result"]["distance_sq"]
    assert scalar_from_json(d) == Fraction(189, 220)

    def walk(node):
        assert not isinstance(node, float)
        if isinstance(node, dict):
            for v in node.values():
                walk(v)
        elif isinstance(node, list):
            for v in node:
                walk(v)

    walk(report)


def test_problem_file_and_errors(tmp_path):
    good = tmp_path / "p.toml"
    good.write_text('variables = ["x", "y"]\nphase = "x^2*y"\nfactors = [[1, 0], [0, 1], ["1", "1"]]\n')
    assert run(["strategy", str(good)])[0] == 0

    bad = tmp_path / "bad.toml"
    bad.write_text('variables = ["x", "y"]\nphase = "x^2 * q"\nfactors = [[1, 0], [0, 1]]\n')
    code, _, err = run(["strategy", str(bad)])
    assert code == 2 and "line 2, column 16" in err and "q" in err

    broken = tmp_path / "broken.toml"
    broken.write_text('variables = ["x", "y"\nphase = "x"\n')
    code, _, err = run(["strategy", str(broken)])
    assert code == 2 and "line" in err

    vec = tmp_path / "vec.toml"
    vec.write_text('variables = ["x", "y"]\nphase = "x*y"\nfactors = [[1, 0], ["sqrt(2) +", 1]]\n')
    code, _, err = run(["strategy", str(vec)])
    assert code == 2 and "line 3" in err


@pytest.mark.parametrize("argv", [
    ["strategy"],
    ["strategy", "--preset", "lightcone6", "--phase", "x^^2"],
    ["strategy", "--preset", "lightcone6", "--max-freeze", "2"],
    ["hyp-check", "--preset", "lightcone6", "--frozen", "q"],
    ["hyp-check", "--preset", "lightcone6", "--operator", "dx dq"],
    ["diff-phase-check", "--preset", "lightcone6", "--pivot", "9"],
    ["estimate-decay", "--preset", "lightcone6"],
    ["estimate-decay", "--preset", "planar3", "--lambda-steps", "3"],
    ["nonsense"],
    ["strategy", "/nonexistent/problem.toml"],
])
def test_input_errors_exit_2(argv):
    assert run(argv)[0] == 2


def test_phase_error_position():
    code, _, err = run(["strategy", "--preset", "lightcone6", "--phase", "x + q"])
    assert code == 2 and "column 5" in err


def test_degree_bound_flag(tmp_path):
    code, _, _, text = run_json(["check-degenerate", "--preset", "lightcone6", "--degree-bound", "4"], tmp_path)
    assert code == 0 and json.loads(text)["problem"]["degree_bound"] == 4
    assert run(["check-degenerate", "--preset", "lightcone6", "--degree-bound", "2"])[0] == 2


def test_estimate_decay_csv(tmp_path):
    csv = tmp_path / "fit.csv"
    code, out, err = run(["estimate-decay", "--preset", "planar3", "--lambda-min", "1", "--lambda-max", "8",
                          "--lambda-steps", "7", "--rel-tol", "1e-3", "--csv", str(csv)])
    assert code in (0, 1), err
    rows = csv.read_text().splitlines()
    assert rows[0] == "lambda,re,im,abs" and len(rows) == 8
    assert "epsilon =" in out
