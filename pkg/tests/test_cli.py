import csv
import json

import numpy as np
import pytest

from normattain.cli import main, run

TPLUSI = {
    "operator": {
        "kind": "sum",
        "children": [
            {"kind": "identity"},
            {
                "kind": "diagonal",
                "sequence": {
                    "kind": "unit_modulus",
                    "real_part": {"kind": "harmonic", "limit": 1, "coeff": 1, "offset": 1},
                },
            },
        ],
    }
}
DIAG1I = {"operator": {"kind": "dense", "matrix": [[1, 0], [0, {"re": 0, "im": 1}]]}}
PSD = {"operator": {"kind": "dense", "matrix": [[2, 1], [1, 2]]}, "options": {"n_max": 2}}


@pytest.fixture
def spec(tmp_path):
    def write(doc, name="spec.json"):
        p = tmp_path / name
        p.write_text(doc if isinstance(doc, str) else json.dumps(doc), encoding="utf-8")
        return str(p)

    return write


def test_check_n_tplusi(spec):
    code, rep = run(["check-n", "--spec", spec(TPLUSI)])
    assert code == 0
    assert rep["result"]["status"] == {"tag": "NotAttained", "rule": "strict-quadratic-gap"}
    assert rep["result"]["norm"] == 2.0


def test_norm_report_fields(spec):
    code, rep = run(["norm", "--spec", spec(DIAG1I)])
    assert code == 0
    assert set(rep) == {"command", "input_digest", "result", "derivation", "tolerances", "seed"}
    assert rep["result"]["exact"] == pytest.approx(1.0)


def test_numrange_csv(spec, tmp_path):
    out = tmp_path / "w.csv"
    code, rep = run(["numrange", "--spec", spec(DIAG1I), "--dim", "2", "--angles", "8", "--csv", str(out)])
    assert code == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    rows = list(csv.reader(raw.decode().splitlines()))
    assert rows[0] == ["theta", "re", "im"] and len(rows) == 9
    pts = np.array([complex(float(r[1]), float(r[2])) for r in rows[1:]])
    # all points on the hull of {1, i}
    assert np.all(np.abs(pts.real + pts.imag - 1.0) <= 1e-8)
    assert np.all(pts.real >= -1e-8) and np.all(pts.imag >= -1e-8)


def test_classify_with_falsifier(spec):
    code, rep = run(["classify-an", "--spec", spec(PSD), "--seed", "7", "--trials", "10", "--dim", "8"])
    assert code == 0 and rep["result"]["verdict"] == "AN"
    assert rep["result"]["falsifier"]["worst_gap"] <= 1e-6
    assert rep["derivation"][-1] == rep["result"]["rule"]


def test_decompose(spec):
    code, rep = run(["decompose", "--spec", spec(PSD)])
    assert code == 0
    assert rep["result"]["betas"] == pytest.approx([3.0, 1.0])


def test_deterministic_output(spec, capsys):
    path = spec(PSD)
    outs = []
    for _ in range(2):
        assert main(["classify-an", "--spec", path, "--seed", "3", "--trials", "5", "--dim", "8"]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]


def test_parse_error_exit_2(spec, capsys):
    assert main(["norm", "--spec", spec('{"kind": "nope"}')]) == 2
    err = json.loads(capsys.readouterr().out)["error"]
    assert err["type"] == "UnknownKind"


def test_invariant_violation_exit_2(spec):
    code, rep = run(["norm", "--spec", spec('{"kind":"diagonal","sequence":{"kind":"geometric","ratio":1.5}}')])
    assert code == 2 and rep["error"]["type"] == "InvariantViolation"


def test_usage_errors_exit_2(spec):
    assert run(["norm"])[0] == 2
    assert run(["bogus"])[0] == 2
    assert run(["norm", "--spec", "/nonexistent/file.json"])[0] == 2
    assert run(["norm", "--spec", spec(DIAG1I), "--dim", "0"])[0] == 2


def test_computation_error_exit_1(spec):
    code, rep = run(["decompose", "--spec", spec(DIAG1I)])
    assert code == 1 and rep["error"]["type"] == "NotPositive"


def test_builtin_suite_passes():
    code, rep = run(["paper-suite"])
    assert code == 0
    assert rep["passed"] == rep["total"] > 10
