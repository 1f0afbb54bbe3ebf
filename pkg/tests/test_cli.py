import json
import math
import subprocess
import sys

import pytest

from freeprod.cli import main
from freeprod.expr import build, parse
from freeprod.graphcore import isomorphic
from freeprod.serialize import graph_from_json, read_density_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


# documented examples


def test_moments_example(capsys):
    assert run_json(capsys, "moments", "--expr", "mfree(K(1),K(1),5)", "--order", "8") == [1, 0, 2, 0, 6, 0, 20, 0, 70]


def test_jacobi_example(capsys):
    j = run_json(capsys, "jacobi", "--expr", "orth(P(3),orth(Z2,F(2)))", "--order", "14")
    assert j["omega"] == ["1", "2", "3/2", "5/6", "4/15", "12/5", "0"]
    assert set(j["alpha"]) == {"0"}


def test_spectrum_example(capsys):
    rep = run_json(capsys, "spectrum", "--family", "KnKm", "--params", "2,2", "--depth", "6")
    assert rep["point_spectrum"] == [pytest.approx(-2.0)]
    ((lo, hi),) = rep["continuous_support"]
    assert lo == pytest.approx(1 - 2 * math.sqrt(2)) and hi == pytest.approx(1 + 2 * math.sqrt(2))
    assert all(level["pass"] for level in rep["levels"])


# other subcommands


def test_moments_at_a_base_vertex(capsys):
    m = run_json(capsys, "moments", "--expr", "Tn(2)", "--order", "4", "--base", "1:1")
    # degree 3 below the root, whose degree is 2: 2 + 3 + 3 + 3 * 2 walks of length 4
    assert m == [1, 0, 3, 0, 14]


def test_implicit_depth_is_deepened(capsys):
    assert run_json(capsys, "moments", "--expr", "Z", "--order", "6") == [1, 0, 2, 0, 6, 0, 20]
    assert run_json(capsys, "moments", "--expr", "Z", "--order", "6", "--base", "1:1") == [1, 0, 2, 0, 6, 0, 20]


def test_explicit_depth_too_shallow(capsys):
    code, _, err = run(capsys, "moments", "--expr", "Z(2)", "--order", "8")
    assert code == 1
    assert json.loads(err)["kind"] == "TruncationTooShallow"


def test_jacobi_tail_detection(capsys):
    j = run_json(capsys, "jacobi", "--expr", "Hn(3)", "--order", "16", "--detect-tail")
    assert j == {"alpha": ["0", "0"], "omega": ["3", "2"], "tail": {"preperiod": 1, "period": 1}}


def test_graph_round_trip(capsys):
    data = run_json(capsys, "graph", "--expr", "mfree(P(3),Tn(2),2)", "--depth", "3")
    g = graph_from_json(data)
    ref = build(parse("mfree(P(3),Tn(2),2)"), 3)
    assert isomorphic(g, ref)
    assert g.faithful_radius == ref.faithful_radius == data["faithful_radius"]


def test_density_and_atoms(capsys, tmp_path):
    jac = tmp_path / "j.json"
    jac.write_text(json.dumps({"alpha": ["0", "1"], "omega": ["2", "2"], "tail": {"preperiod": 1, "period": 1}}))
    code, out, _ = run(capsys, "density", "--jacobi", str(jac), "--grid", "-1:3:5")
    assert code == 0
    rows = read_density_csv(out)
    assert [x for x, _ in rows] == [-1.0, 0.0, 1.0, 2.0, 3.0]
    assert rows[2][1] == pytest.approx(math.sqrt(8) / (6 * math.pi), abs=1e-9)
    csv_path = tmp_path / "d.csv"
    meta = run_json(capsys, "density", "--jacobi", str(jac), "--grid", "-1:3:5", "--out", str(csv_path))
    assert meta["grid"] == str(csv_path) and read_density_csv(csv_path.read_text()) == rows
    atoms = run_json(capsys, "atoms", "--expr", "orth(K(1),K(1))", "--order", "8")
    assert [m for _, m in atoms["atoms"]] == [pytest.approx(0.25), pytest.approx(0.5), pytest.approx(0.25)]


def test_qdecomp(capsys):
    rep = run_json(capsys, "qdecomp", "--expr", "mfree(K(2),K(2),8)", "--v0", "level0:1", "--depth", "8")
    assert rep["level_sizes"][:4] == [3, 6, 12, 24]
    assert rep["vacuum_dimensions"][:4] == [3, 3, 6, 12]
    assert all(rep["components"].values())
    assert rep["level0_indicator"]["omega"][:3] == ["2", "2", "2"]
    rep = run_json(capsys, "qdecomp", "--expr", "Tn(2)", "--depth", "5")
    assert rep["level_sizes"][:3] == [1, 2, 4]


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "freeness", "--expr", "mfree(K(2),P(3),3)"],
        ["check", "orthogonality", "--expr", "orth(P(3),F(2))"],
        ["check", "sfreeness", "--expr", "branch(K(2),K(2),1,6)"],
        ["check", "decomp", "--expr", "mfree(P(3),F(2),3)"],
    ],
)
def test_checks_pass(capsys, argv):
    records = run_json(capsys, *argv)
    assert records and all(r["pass"] for r in records)


def test_failed_check_exits_one(capsys):
    code, out, _ = run(capsys, "check", "sfreeness", "--expr", "branch(K(2),K(2),1,6)", "--printed-form")
    assert code == 1
    assert any(not r["pass"] for r in json.loads(out))


def test_convolve_and_file_checks(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    a.write_text(json.dumps({"moments": [1, 0, 1, 0, 1, 0, 1, 0, 1]}))
    b.write_text(json.dumps({"alpha": ["0"], "omega": ["1"], "tail": {"preperiod": 0, "period": 1}}))
    out = run_json(capsys, "convolve", "--op", "free", "--a", str(a), "--b", str(a), "--order", "6")
    assert out["moments"] == ["1", "0", "2", "0", "6", "0", "20"]
    out = run_json(capsys, "convolve", "--op", "mfree", "--a", str(a), "--b", str(a), "--order", "6", "--m", "3")
    assert out["moments"][:7] == ["1", "0", "2", "0", "6", "0", "20"]
    for kind in ("prop31", "decomp"):
        records = run_json(capsys, "check", kind, "--a", str(a), "--b", str(b), "--order", "8")
        assert all(r["pass"] for r in records)


# errors and exit codes


@pytest.mark.parametrize(
    "argv,kind",
    [
        (["moments", "--expr", "star(K(2)", "--order", "4"], "syntax"),
        (["moments", "--order", "4"], "usage"),
        (["nosuch"], "usage"),
        (["density", "--expr", "K(2)", "--grid", "1:2"], "usage"),
        (["convolve", "--op", "mfree", "--a", "x", "--b", "y", "--order", "4"], "FileNotFoundError"),
        (["spectrum", "--family", "KnKm", "--params", "2,x"], "usage"),
        (["check", "orthogonality", "--expr", "star(K(1),K(1))"], "usage"),
    ],
)
def test_error_json(capsys, argv, kind):
    code, out, err = run(capsys, *argv)
    payload = json.loads(err)
    assert payload["kind"] == kind and payload["error"]
    assert code == (2 if kind in ("syntax", "usage") else 1)
    assert out == ""


def test_syntax_error_reports_position(capsys):
    _, _, err = run(capsys, "graph", "--expr", "star(K(2)")
    assert json.loads(err)["error"].startswith("1:10:")


def test_domain_error_for_bad_word(capsys):
    code, _, err = run(capsys, "moments", "--expr", "K(2)", "--order", "2", "--base", "2:1")
    assert code == 1 and json.loads(err)["kind"] == "KeyError"


def test_output_is_deterministic(capsys):
    argv = ["spectrum", "--family", "KnFm", "--params", "2,3", "--depth", "7"]
    first = run(capsys, *argv)
    assert run(capsys, *argv) == first


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "freeprod.cli", "moments", "--expr", "K(2)", "--order", "3"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == [1, 0, 2, 2]
