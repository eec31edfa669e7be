import csv
import json
import math

import pytest

from quadcurv.cli import main, write_metric_file
from quadcurv.metric_core import counterexample_F, validate
from quadcurv.model_geometry import Sphere, pairwise_quadruple_distances


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


@pytest.fixture
def f_file(tmp_path):
    path = tmp_path / "f.json"
    write_metric_file(str(path), counterexample_F(0.1))
    return str(path)


@pytest.fixture
def square_file(tmp_path):
    r2 = math.sqrt(2)
    path = tmp_path / "square.json"
    path.write_text(json.dumps({
        "format": 1,
        "labels": ["a", "b", "c", "d"],
        "distances": [[0, 1, r2, 1], [1, 0, 1, r2], [r2, 1, 0, 1], [1, r2, 1, 0]],
    }))
    return str(path)


def test_check_counterexample(capsys, f_file):
    code, rep = run(capsys, "check", f_file)
    assert code == 1
    opt = rep["conditions"]["one_plus_three"]
    assert opt["verdict"] == "FAIL"
    assert opt["worst_labeling"][0] == "p"
    assert rep["conditions"]["star"]["verdict"] == "PASS"


def test_check_square(capsys, square_file):
    code, rep = run(capsys, "check", square_file)
    assert code == 0
    assert rep["passed"] is True


@pytest.mark.parametrize(
    "content",
    ["not json", json.dumps({"labels": ["a"]}), json.dumps({"format": 2, "labels": [], "distances": []}),
     json.dumps({"labels": ["a", "b", "c"], "distances": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]})],
)
def test_check_malformed(capsys, tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    code, rep = run(capsys, "check", str(path))
    assert code == 2
    assert "error" in rep


def test_triangle_violation_reported(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"labels": ["a", "b", "c"], "distances": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]}))
    _, rep = run(capsys, "check", str(path))
    assert rep["error"] == "TriangleViolation"
    assert (rep["i"], rep["k"], rep["j"]) == (0, 2, 1)


def test_missing_file(capsys, tmp_path):
    code, _ = run(capsys, "check", str(tmp_path / "nope.json"))
    assert code == 2


def test_embed_square(capsys, square_file):
    code, rep = run(capsys, "embed", square_file)
    assert code == 0
    assert rep["target"] == "plane"
    assert len(rep["coordinates"]) == 4


def test_embed_sphere_file(capsys, tmp_path):
    import numpy as np

    S = Sphere(2.0)
    d = pairwise_quadruple_distances(S, S.sample(np.random.default_rng(4), 4))
    path = tmp_path / "s.json"
    write_metric_file(str(path), validate(d))
    code, rep = run(capsys, "embed", str(path))
    assert code == 0
    assert rep["target"] == "sphere"
    assert rep["radius"] > 0


def test_embed_counterexample(capsys, f_file):
    code, rep = run(capsys, "embed", f_file)
    assert code == 1
    assert rep["certificate"]["kind"] == "NoEmbeddingFound"


def test_sample_sphere(capsys):
    code, rep = run(capsys, "sample", "--space", "sphere", "--radius", "1", "--count", "2000", "--seed", "7")
    assert code == 0
    assert rep["status"] == "PASS"


def test_sample_hyperbolic(capsys, tmp_path):
    out = tmp_path / "h.csv"
    code, rep = run(
        capsys, "sample", "--space", "hyperbolic", "--kappa", "-1", "--radius", "10",
        "--count", "1000", "--seed", "3", "--csv", str(out),
    )
    assert code == 0
    assert rep["conditions"]["star"]["violations"] > 0
    rows = list(csv.DictReader(out.open()))
    assert sum(int(r["count"]) for r in rows) == 4000


def test_sample_count_zero(capsys):
    code, rep = run(capsys, "sample", "--count", "0")
    assert code == 0
    assert rep["conditions"]["star"]["evaluated"] == 0


def test_sample_falsifying_exit(capsys):
    code, rep = run(capsys, "sample", "--space", "cone", "--theta", "4", "--count", "5000", "--seed", "1",
                    "--conditions", "star")
    # a cone of angle 4*pi is not nonnegatively curved, so violations are not a failure
    assert rep["status"] == "FALSIFYING"
    assert code == 0


def test_sample_seed_from_env(capsys, monkeypatch):
    monkeypatch.setenv("QUADCURV_SEED", "5")
    _, a = run(capsys, "sample", "--count", "100")
    _, b = run(capsys, "sample", "--count", "100", "--seed", "5")
    assert a == b


def test_report_precision(capsys):
    _, rep = run(capsys, "sample", "--count", "50", "--seed", "1")
    v = rep["conditions"]["star"]["min_residual"]
    assert len(repr(v).replace(".", "").lstrip("0").split("e")[0]) <= 13


def test_iterate_collinear(capsys):
    code, rep = run(capsys, "iterate", "--space", "euclidean", "--p", "0,0", "--q", "2,0", "--x", "3,0")
    assert code == 0
    assert [c["alpha"] for c in rep["columns"]] == [2.0] * 13


def test_iterate_sphere(capsys):
    code, rep = run(
        capsys, "iterate", "--space", "sphere", "--p", "1,0,0", "--q", "0,1,0", "--x", "0.6,0,0.8",
    )
    assert code == 0
    assert all(c["alpha_le_3"] for c in rep["columns"])
    assert all(c["recursion_ok"] for c in rep["columns"][:-1])
    assert rep["midpoint_residual_n0"] >= -1e-6


def test_iterate_x_equals_z(capsys):
    code, rep = run(capsys, "iterate", "--space", "euclidean", "--p", "0,0", "--q", "2,0", "--x", "1,0")
    assert code == 2
    assert rep["error"] == "XEqualsZ"


def test_iterate_off_surface(capsys):
    code, _ = run(capsys, "iterate", "--space", "sphere", "--p", "2,0,0", "--q", "0,1,0", "--x", "0,0,1")
    assert code == 2


def test_counterexample_command(capsys, tmp_path):
    path = tmp_path / "f.json"
    code, rep = run(capsys, "counterexample", "--eps", "0.01", "0.1", "--write", str(path))
    assert code == 0
    assert all(r["expected"] for r in rep["counterexample"])
    assert validate(json.loads(path.read_text())["distances"]).n == 4


def test_bad_arguments(capsys):
    assert main(["sample", "--space", "torus"]) == 2
    capsys.readouterr()


def test_negative_tol(capsys):
    code, _ = run(capsys, "sample", "--count", "1", "--tol", "-1")
    assert code == 2
