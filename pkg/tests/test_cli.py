import io
import json
import subprocess
import sys

import pytest

from tyind.cli import main

EX1 = "A2+A2+A2+A2+A4|-"
EX2 = "A2+A2+A4+A4|+"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_theta():
    code, out, _ = run("theta", "--form", "A4")
    assert code == 0 and json.loads(out) == {"radicand": 1, "phase_eighth": 1}
    code, out, _ = run("theta", "--form", "A4", "--oracle")
    obj = json.loads(out)
    assert obj["exact"] == {"radicand": 1, "phase_eighth": 1}
    assert abs(complex(*obj["oracle"]) - (0.5 ** 0.5) * (1 + 1j)) < 1e-9


def test_theta_degenerate_quadratic_json():
    spec = '{"group": "Z/2", "gram": [["0"]], "q": ["1/2"]}'
    code, out, _ = run("theta", "--form", spec)
    assert code == 0 and json.loads(out) == "zero"


def test_lens_example():
    code, out, _ = run("lens", "--group", "Z/2+Z/2+Z/2+Z/2+Z/4", "--form", "A2+A2+A2+A2+A4", "--tau", "-", "--k", "3")
    assert code == 0
    assert json.loads(out) == {"base": ["1/128", 0, 0, 0], "rad_coeff": [0, 0, 0, 0], "radicand": 1}


def test_compare_and_witness():
    code, out, _ = run("compare", EX1, EX2)
    assert code == 0
    obj = json.loads(out)
    assert obj["equivalent"] is False and obj["lens_equal_upto"] == 64 and obj["witness_k"] == 2
    code, out, _ = run("witness", "A3|+", "B3|+")
    obj = json.loads(out)
    assert obj["witness_k"] == 6 and obj["reason"] == "odd-part"
    code, out, _ = run("compare", "A3+A3|+", "B3+B3|+", "--lens-bound", "8")
    assert json.loads(out) == {"equivalent": True, "lens_equal_upto": 8, "witness_k": None}


def test_compare_json_specs():
    a = '{"group": "Z/3", "gram": [["1/3"]], "tau": "+"}'
    code, out, _ = run("compare", a, "A3|+", "--lens-bound", "6")
    assert code == 0 and json.loads(out)["equivalent"] is True


def test_decompose_and_sigma():
    code, out, _ = run("decompose", "--group", "Z/3+Z/3", "--gram", '[["0","1/3"],["1/3","0"]]')
    obj = json.loads(out)
    assert code == 0 and sorted(obj["blocks"]) == ["A3", "B3"]
    assert all(op[0] in ("flip", "add", "scale") for op in obj["ops"])
    code, out, _ = run("sigma", "--form", "E2", "--k", "1")
    assert json.loads(out) == {"sigma": 0}
    code, out, _ = run("sigma", "--form", "A2", "--k", "1")
    assert json.loads(out) == {"sigma": "infinity"}


def test_ranges_and_table():
    code, out, _ = run("indicator", "--form", "A2", "--tau", "+", "--k-range", "1..4")
    rows = [json.loads(line) for line in out.splitlines()]
    assert [r["k"] for r in rows] == [1, 2, 3, 4]
    assert rows[0]["nu_m"] == "zero" and rows[1]["nu_m"] == {"radicand": 1, "phase_eighth": 0}
    code, out, _ = run("sweep", "--form", "A3", "--tau", "-", "--k-range", "1..3", "--table")
    lines = out.splitlines()
    assert code == 0 and lines[0].split() == ["k", "nu_m", "lens"] and len(lines) == 4


@pytest.mark.parametrize("argv,code", [
    (["theta", "--form", "A2+X4"], 1),
    (["theta", "--group", "Z/12", "--gram", "[[\"1/12\"]]"], 1),
    (["lens", "--form", "A3", "--k", "2"], 1),
    (["lens", "--form", "A3", "--tau", "+"], 1),
    (["sigma", "--form", "A2", "--k", "0"], 1),
    (["decompose", "--group", "Z/4", "--gram", "[[\"1/2\"]]"], 2),
    (["theta", "--group", "Z/4", "--gram", "[[\"1/2\"]]"], 2),
    (["bogus"], 1),
])
def test_error_exit_codes(argv, code):
    got, out, err = run(*argv)
    assert got == code
    assert out == ""
    if argv[0] != "bogus":
        assert "error" in json.loads(err)


def test_parse_error_reports_position():
    code, _, err = run("theta", "--form", "A2+X4")
    assert json.loads(err) == {"error": "expected a block name such as A4 or E2", "position": 3}


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tyind.cli", "theta", "--form", "E2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout) == {"radicand": 1, "phase_eighth": 0}
