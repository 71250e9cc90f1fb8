import json
import math

import pytest

from orlicz_polar.cli import main

SQUARE = {
    "dimension": 2,
    "atoms": [{"u": [1, 0], "lambda": 1}, {"u": [0, 1], "lambda": 1}, {"u": [-1, 0], "lambda": 1}, {"u": [0, -1], "lambda": 1}],
    "phi": {"kind": "power", "p": 2},
    "g": {"kind": "power", "q": 2},
}
ANGLES = [(0.1, 1.0), (1.9, 2.0), (3.3, 1.5), (4.6, 0.7)]
ASYMMETRIC = [{"u": [math.cos(t), math.sin(t)], "lambda": w} for t, w in ANGLES]
BALL3 = {"kind": "ball", "dimension": 3, "parameters": {"radius": 1.0}}
G3 = json.dumps({"kind": "power", "q": 3})


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_dual_and_hat(tmp_path, capsys):
    body = write(tmp_path, "ball.json", BALL3)
    code, out, _ = run(capsys, ["eval", "--functional", "dual", "--body", body, "--g", G3])
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(4.18879, abs=1e-5) and doc["resolution"] == 48 and "runtime_ms" in doc
    code, out, _ = run(capsys, ["eval", "--functional", "hat-dual", "--body", body, "--g", G3, "--resolution", "24"])
    assert json.loads(out)["value"] == pytest.approx(1.61199, abs=1e-5)


def test_eval_general_on_cube(capsys):
    cube = {"kind": "polytope", "dimension": 3, "parameters": {"normals": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]], "offsets": [1] * 6}}
    for functional in ("general", "hat-general"):
        code, out, _ = run(capsys, ["eval", "--functional", functional, "--body", json.dumps(cube), "--g", '{"kind": "power", "q": 1}'])
        assert code == 0 and json.loads(out)["value"] == pytest.approx(8.0)


def test_eval_orlicz_norm(tmp_path, capsys):
    measure = write(tmp_path, "mu.json", {"atoms": SQUARE["atoms"]})
    code, out, _ = run(capsys, ["eval", "--functional", "orlicz-norm", "--measure", measure, "--phi", '{"kind": "power", "p": 2}'])
    assert code == 0 and json.loads(out)["value"] == pytest.approx(1.0, abs=1e-12)
    measure = write(tmp_path, "mu2.json", {"atoms": SQUARE["atoms"], "h": [1, 1, 2, 2]})
    code, out, _ = run(capsys, ["eval", "--functional", "orlicz-norm", "--measure", measure, "--phi", '{"kind": "power", "p": 2}'])
    assert json.loads(out)["value"] == pytest.approx(2.5**0.5)


def test_eval_schema_error(tmp_path, capsys):
    body = write(tmp_path, "bad.json", {"kind": "ball", "dimension": 3, "parameters": {"radius": -1}})
    code, _, err = run(capsys, ["eval", "--functional", "dual", "--body", body, "--g", G3])
    assert code == 2 and "schema" in err
    code, _, _ = run(capsys, ["eval", "--functional", "dual", "--body", json.dumps(BALL3), "--g", '{"kind": "power", "q": 3, "extra": 1}'])
    assert code == 2


def test_eval_numeric_failure_names_node(capsys):
    ball = json.dumps({"kind": "ball", "dimension": 3, "parameters": {"radius": 1000.0}})
    code, _, err = run(capsys, ["eval", "--functional", "dual", "--body", ball, "--g", '{"kind": "exponential", "rate": 10}'])
    assert code == 3 and "node" in err


def test_solve_writes_deterministic_output(tmp_path, capsys):
    inst = write(tmp_path, "square.json", SQUARE)
    code, out, _ = run(capsys, ["solve", "--instance", inst, "--out", str(tmp_path / "a")])
    assert code == 0
    summary = json.loads(out)
    assert summary["objective_value"] == pytest.approx(2.56094, abs=1e-5)
    assert abs(summary["constraint_residual"]) <= 1e-6
    code, _, _ = run(capsys, ["solve", "--instance", inst, "--out", str(tmp_path / "b"), "--threads", "4"])
    a = (tmp_path / "a" / "solution.json").read_bytes()
    assert a == (tmp_path / "b" / "solution.json").read_bytes()
    poly = json.loads((tmp_path / "a" / "polytope.json").read_text(encoding="utf-8"))
    assert poly["kind"] == "polytope"


def test_solve_hemisphere_failure(tmp_path, capsys):
    bad = dict(SQUARE, atoms=[{"u": [1, 0], "lambda": 1}, {"u": [0, 1], "lambda": 1}, {"u": [0.6, 0.8], "lambda": 1}])
    code, _, err = run(capsys, ["solve", "--instance", write(tmp_path, "h.json", bad), "--out", str(tmp_path / "o")])
    assert code == 2 and "hemisphere" in err


def test_solve_petty(tmp_path, capsys):
    petty = {
        "dimension": 2,
        "petty_reference": {"kind": "polytope", "dimension": 2, "parameters": {"normals": [[1, 0], [0, 1], [-1, 0], [0, -1]], "offsets": [1, 1, 1, 1]}},
        "phi": {"kind": "power", "p": 2},
        "g": {"kind": "power", "q": 2},
    }
    code, _, _ = run(capsys, ["solve", "--instance", write(tmp_path, "p.json", petty), "--out", str(tmp_path / "o")])
    assert code == 0
    doc = json.loads((tmp_path / "o" / "solution.json").read_text(encoding="utf-8"))
    assert doc["solution"]["max_facial_defect"] <= 1e-5
    assert "petty_reference" in doc["instance"]


def test_solve_unconverged_exit_code(tmp_path, capsys):
    inst = write(tmp_path, "q.json", dict(SQUARE, atoms=ASYMMETRIC))
    code, _, _ = run(capsys, ["solve", "--instance", inst, "--out", str(tmp_path / "o"), "--budget", "20", "--starts", "1"])
    assert code == 4
    assert (tmp_path / "o" / "solution.json").exists()


def test_unknown_instance_key(tmp_path, capsys):
    code, _, err = run(capsys, ["solve", "--instance", write(tmp_path, "x.json", dict(SQUARE, colour="red")), "--out", str(tmp_path / "o")])
    assert code == 2 and "colour" in err


def test_experiment_commands(tmp_path, capsys):
    code, out, _ = run(capsys, ["experiment", "--name", "hat-homogeneity", "--out", str(tmp_path)])
    assert code == 0 and json.loads(out)["passed"] == 1
    assert (tmp_path / "hat-homogeneity.json").exists() and (tmp_path / "summary.json").exists()
    code, _, err = run(capsys, ["experiment", "--name", "nonexistent"])
    assert code == 2 and "hat-homogeneity" in err
    code, out, _ = run(capsys, ["experiment", "--name", "cone-dual-volume", "--set", "r=0.25"])
    assert code == 0


def test_experiment_failure_exit(capsys):
    code, out, _ = run(capsys, ["experiment", "--name", "cone-dual-volume", "--set", "tol=0", "--set", "R=2.0", "--set", "r=0.25"])
    assert code == 1 and json.loads(out)["failed"] == ["cone-dual-volume"]


@pytest.mark.slow
def test_experiment_all(tmp_path, capsys):
    code, out, _ = run(capsys, ["experiment", "--all", "--out", str(tmp_path)])
    summary = json.loads(out)
    assert code == 0 and summary["passed"] == summary["total"]


def test_validate(tmp_path, capsys):
    code, out, _ = run(capsys, ["validate", "--instance", write(tmp_path, "s.json", SQUARE), "--phi", '{"kind": "texp"}'])
    assert code == 0 and json.loads(out)["checked"] == ["instance", "phi"]
    code, _, _ = run(capsys, ["validate"])
    assert code == 2
    code, _, _ = run(capsys, ["validate", "--g", '{"kind": "polynomial", "coefficients": [1], "exponents": [2, 3]}'])
    assert code == 2
