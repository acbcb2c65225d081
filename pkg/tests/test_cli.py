import json
import subprocess
import sys
from fractions import Fraction

import pytest

from conftest import CUSP, TWO_PARAM
from polarinv.cli import main
from polarinv.invariant import Inv2
from polarinv.scalars import Exact, scalar_from_json


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_cusp_family(capsys):
    code, out, _ = run(capsys, "analyze", CUSP, "--param", "t=1")
    assert code == 0
    assert "{y^12, y^12; (12, (-4)*y^15), (12, (4)*y^15)}" in out


def test_analyze_empty_singular_locus(capsys):
    code, out, _ = run(capsys, "analyze", "x^2 + y^2")
    assert code == 0
    assert "Sigma_f empty; Inv2 = {}" in out


def test_analyze_json_round_trip(capsys):
    code, out, _ = run(capsys, "analyze", TWO_PARAM, "--param", "b=1", "--param", "c=1", "--json")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"input", "options", "analysis"}
    inv = doc["analysis"]["inv2"]
    back = Inv2.from_json(inv)
    (d,) = back.packets
    assert sorted(e.a0.re for e in d.leading) == [1, Fraction(31, 27)]
    assert sorted(p.nu.re for p in d.pairs) == [Fraction(-18, 31), Fraction(18, 31)]
    assert scalar_from_json(inv["lines"][0]["lambda"]) == Exact(0)


def test_compare_refutes(capsys):
    code, out, _ = run(capsys, "compare", CUSP, CUSP, "--param1", "t=1", "--param2", "t=2")
    assert code == 1
    assert "c^12 = 1; c^3 in {8,-8}" in out


def test_compare_self_is_consistent(capsys):
    code, out, _ = run(capsys, "compare", CUSP, CUSP, "--param", "t=1", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["comparison"]["decision"] == "ConsistentWithEquivalence"
    assert "1" in doc["comparison"]["witnesses"][0]["c"][0]


def test_compare_two_param_family(capsys):
    code, _, _ = run(
        capsys, "compare", TWO_PARAM, TWO_PARAM, "--param1", "b=1", "--param1", "c=1", "--param2", "b=2", "--param2", "c=1"
    )
    assert code == 1


def test_arcs_of_polar_equation(capsys):
    code, out, _ = run(capsys, "arcs", "3*x^2 - 3*y^10")
    assert code == 0
    assert "(-1)*y^5" in out and "(1)*y^5" in out


def test_arcs_ramified(capsys):
    code, out, _ = run(capsys, "arcs", "x^2 - y^3", "--json")
    assert code == 0
    doc = json.loads(out)
    text = json.dumps(doc)
    assert '"N": 2' in text and "3/2" in text


def test_arcs_polar_flag(capsys):
    code, out, _ = run(capsys, "arcs", CUSP, "--param", "t=1", "--polar")
    assert code == 0
    assert "y^5" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "3x + y"],
        ["analyze", "x^2 + t*y^3"],
        ["analyze", "y^2 + x^3"],
        ["analyze", "(x - y)^2"],
        ["analyze", "1 + x"],
    ],
)
def test_invalid_input_exit_code(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert err.strip()


def test_truncation_cap_exit_code(capsys):
    # the polar arcs of this germ are infinite series
    code, _, err = run(capsys, "analyze", TWO_PARAM, "--param", "b=1", "--param", "c=1", "--max-terms", "2")
    assert code == 4
    assert "truncation cap" in err


def test_deterministic_across_threads(capsys):
    _, a, _ = run(capsys, "analyze", TWO_PARAM, "--param", "b=1", "--param", "c=1", "--json")
    _, b, _ = run(capsys, "analyze", TWO_PARAM, "--param", "b=1", "--param", "c=1", "--json", "--threads", "4")
    da, db = json.loads(a), json.loads(b)
    da["options"].pop("threads", None)
    db["options"].pop("threads", None)
    assert da == db


def test_selftest_subprocess():
    proc = subprocess.run([sys.executable, "-m", "polarinv", "selftest"], capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "FAIL" not in proc.stdout
