import json

import numpy as np
import pytest

from reachkit.cli import main
from reachkit.io import parse_cloud, read_cloud


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def report(path):
    return json.loads(path.read_text())


@pytest.fixture
def circle_csv(tmp_path, capsys):
    path = tmp_path / "circle.csv"
    assert run(["generate", "circle", "--radius", 1, "--n", 256, "-o", path], capsys)[0] == 0
    return path


def test_generate_circle(circle_csv):
    lines = circle_csv.read_text().splitlines()
    assert lines[0] == "x1,x2" and len(lines) == 257
    assert read_cloud(circle_csv).points.shape == (256, 2)


def test_reach_federer(circle_csv, tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["reach", "--method", "federer", "--input", circle_csv, "--h", 0.2, "--h-min", 0.1, "-o", out], capsys)
    assert code == 0
    rep = report(out)
    assert rep["method"] == "federer" and abs(rep["value"] - 1.0) < 0.1
    assert set(rep) == {"method", "value", "witness", "pairs_used", "h_min", "warnings"}


def test_reach_stdout_and_tsv(circle_csv, capsys):
    code, out, _ = run(["reach", "--method", "midpoint", "-i", circle_csv, "--h-min", 1.5], capsys)
    assert code == 0 and abs(json.loads(out)["value"] - 1) < 2e-3
    code, out, _ = run(["reach", "--method", "midpoint", "-i", circle_csv, "--h-min", 1.5, "--format", "tsv"], capsys)
    assert code == 0 and out.startswith("method\tmidpoint\n")


def test_convex_reports_inf(tmp_path, capsys):
    seg = tmp_path / "seg.csv"
    run(["generate", "segment", "--n", 50, "-o", seg], capsys)
    code, out, _ = run(["reach", "--method", "federer", "-i", seg], capsys)
    assert code == 0 and json.loads(out)["value"] == "inf"


@pytest.mark.parametrize(
    "argv",
    [
        ["reach", "--method", "bogus", "-i", "x.csv"],
        ["frobnicate"],
        [],
        ["generate", "circle", "--n", "0"],
        ["reach", "--method", "federer", "-i", "x.csv", "--h", "-1"],
    ],
)
def test_usage_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and "usage" in err


def test_domain_errors(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("x1,x2\n0,1\n0,oops\n")
    code, _, err = run(["reach", "--method", "federer", "-i", bad], capsys)
    assert code == 1 and "line 3" in err and "x2" in err
    spec = tmp_path / "spec.json"
    spec.write_text('{"variant": "minus",\n "r": }')
    code, _, err = run(["generate", "bset", "--spec", spec], capsys)
    assert code == 1 and "line 2" in err
    code, _, err = run(["reach", "--method", "federer", "-i", tmp_path / "missing.csv"], capsys)
    assert code == 1 and err.startswith("reachkit: error:")


def test_failed_write_leaves_no_partial_file(circle_csv, tmp_path, capsys):
    target = tmp_path / "out.json"
    target.write_text("old")
    code, _, _ = run(["reach", "--method", "federer", "-i", tmp_path / "missing.csv", "-o", target], capsys)
    assert code == 1 and target.read_text() == "old"
    assert [p.name for p in tmp_path.iterdir() if p.name.endswith(".tmp")] == []


BSET = {
    "variant": "minus",
    "r": 1.0,
    "top": {"pieces": [{"interval": [0, 1], "coeffs": [0, 0, 1]}], "c": 2},
    "bottom": {"pieces": [{"interval": [0, 1], "coeffs": [0, 0, -1]}], "c": 2},
}


def pipelines(tmp):
    bset = tmp / "bset.json"
    bset.write_text(json.dumps(BSET))
    rot = tmp / "rot.json"
    rot.write_text(json.dumps({"dim": 3, "contact": [[0, 0]], "rotations": [{"plane": [2, 3], "angle": 0}, {"plane": [2, 3], "angle": 1.5}]}))
    alpha = tmp / "alpha.json"
    alpha.write_text(json.dumps({"dim": 2, "atoms": [{"t": 0.3, "jump": [[0, 1], [0, 0]]}, {"t": 0.7, "jump": [[0, 0], [1, 0]]}]}))
    wd = tmp / "wd.json"
    wd.write_text(json.dumps({"domain": [[0], [1], [2]], "f": [[0], [1], [4]], "phi": [[[0]], [[2]], [[4]]]}))
    return [
        [["generate", "circle", "--n", 128, "-o", tmp / "c.csv"],
         ["stratify", "-i", tmp / "c.csv", "--h", 0.2, "--summary", tmp / "c_sum.json", "-o", tmp / "c_lab.csv"],
         ["reach", "--method", "federer", "-i", tmp / "c_lab.csv", "--h", 0.2, "-o", tmp / "c_fed.json"],
         ["reach", "--method", "midpoint", "-i", tmp / "c.csv", "--h-min", 1.2, "-o", tmp / "c_mid.json"],
         ["reach", "--method", "projection", "-i", tmp / "c.csv", "--probe-count", 512, "-o", tmp / "c_proj.json"],
         ["lipcheck", "-i", tmp / "c_lab.csv", "--k", 1, "--h", 0.2, "--name", "psi1_bound", "--r", 1, "-o", tmp / "c_lip.json"],
         ["whitney", "--cloud", tmp / "c.csv", "--k", 1, "--h", 0.2, "-o", tmp / "c_wh.json"]],
        [["generate", "sphere", "--n", 200, "-o", tmp / "s.csv"],
         ["stratify", "-i", tmp / "s.csv", "-o", tmp / "s_lab.csv"],
         ["reach", "--method", "midpoint", "-i", tmp / "s.csv", "-o", tmp / "s_mid.json"]],
        [["generate", "segment", "--n", 60, "--dim", 3, "-o", tmp / "g.csv"],
         ["stratify", "-i", tmp / "g.csv", "--h", 0.05, "-o", tmp / "g_lab.csv"],
         ["reach", "--method", "federer", "-i", tmp / "g.csv", "--h", 0.05, "-o", tmp / "g_fed.json"]],
        [["generate", "doubleton", "--h", 0.3, "-o", tmp / "d.csv"],
         ["reach", "--method", "midpoint", "-i", tmp / "d.csv", "--h-min", 0.1, "--eps-zero", 0, "-o", tmp / "d_mid.json"]],
        [["generate", "convex-polygon", "--n", 6, "-o", tmp / "p.csv"],
         ["stratify", "-i", tmp / "p.csv", "-o", tmp / "p_lab.csv"],
         ["reach", "--method", "midpoint", "-i", tmp / "p.csv", "-o", tmp / "p_mid.json"]],
        [["generate", "bset", "--spec", bset, "--grid-step", 0.05, "--contact-output", tmp / "b_contact.json", "-o", tmp / "b.csv"],
         ["stratify", "-i", tmp / "b.csv", "--h", 0.15, "-o", tmp / "b_lab.csv"],
         ["reach", "--method", "midpoint", "-i", tmp / "b.csv", "--h-min", 0.3, "-o", tmp / "b_mid.json"]],
        [["generate", "bset", "--spec", bset, "--grid-step", 0.05, "--dim", 3, "-o", tmp / "b3.csv"],
         ["generate", "multirotate", "--spec", rot, "-i", tmp / "b3.csv", "-o", tmp / "b3_rot.csv"],
         ["stratify", "-i", tmp / "b3_rot.csv", "--h", 0.15, "-o", tmp / "b3_lab.csv"],
         ["reach", "--method", "federer", "-i", tmp / "b3_rot.csv", "--h", 0.15, "-o", tmp / "b3_fed.json"]],
        [["generate", "example-m", "--contact", "[[0,0],[0.5,0.5]]", "--angles", "[1.5708,3.14159]", "--grid-step", 0.05, "--kappa", 2, "-o", tmp / "m.json"],
         ["stratify", "-i", tmp / "m.json", "--h", 0.15, "-o", tmp / "m_lab.csv"],
         ["reach", "--method", "midpoint", "-i", tmp / "m.json", "--h-min", 0.3, "-o", tmp / "m_mid.json"]],
        [["gap", "--u", "[[1,0]]", "--v", "[[0.8660254037844387,0.5]]", "-o", tmp / "gap.json"],
         ["fullness", "--vertices", "[[0,0],[1,0],[0,1]]", "-o", tmp / "full.json"],
         ["prodint", "eval", "--spec", alpha, "--s", 0, "--t", 1, "-o", tmp / "mu.json"],
         ["prodint", "eval", "--spec", alpha, "--s", 0, "--t", 1, "--mesh", 1, "-o", tmp / "mu_coarse.json"],
         ["prodint", "bound", "--spec", alpha, "--s", 0, "--t", 1, "-o", tmp / "bound.json"],
         ["whitney", "-i", wd, "-o", tmp / "wd_out.json"]],
    ]


def run_all(tmp, capsys):
    for pipeline in pipelines(tmp):
        for argv in pipeline:
            code, _, err = run(argv, capsys)
            assert code == 0, (argv, err)
    return {p.name: p.read_bytes() for p in sorted(tmp.iterdir())}


def test_pipelines_are_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir()
    b.mkdir()
    first = run_all(a, capsys)
    second = run_all(b, capsys)
    assert first.keys() == second.keys()
    assert first == second


def test_pipeline_values(tmp_path, capsys):
    run_all(tmp_path, capsys)
    assert report(tmp_path / "gap.json")["gap"] == pytest.approx(0.5, abs=1e-12)
    assert report(tmp_path / "full.json")["fullness"] == 0.25
    assert report(tmp_path / "mu.json")["mu"] == [[2.0, 1.0], [1.0, 1.0]]
    assert report(tmp_path / "mu_coarse.json")["mu"] == [[1.0, 1.0], [1.0, 1.0]]
    assert report(tmp_path / "bound.json")["satisfied"] is True
    assert report(tmp_path / "wd_out.json")["c"] == 2.0
    assert report(tmp_path / "d_mid.json")["value"] == pytest.approx(0.3, abs=1e-12)
    assert report(tmp_path / "p_mid.json")["value"] == "inf"
    assert report(tmp_path / "c_lip.json")["satisfied"] is True
    assert report(tmp_path / "c_wh.json")["c"] <= 1.1
    assert report(tmp_path / "b_contact.json") == {"contact": [[0.0, 0.0]]}
    summary = report(tmp_path / "c_sum.json")
    assert summary["counts"] == {"1,true": 128}
    labelled = parse_cloud((tmp_path / "b_lab.csv").read_text())
    origin = int(np.flatnonzero(np.all(labelled.points == 0, axis=1))[0])
    assert (labelled.labels[origin].k, labelled.labels[origin].full_span) == (1, False)
    rot = read_cloud(tmp_path / "b3_rot.csv").points
    flat = read_cloud(tmp_path / "b3.csv").points
    assert np.allclose(np.linalg.norm(rot, axis=1), np.linalg.norm(flat, axis=1), atol=1e-12)


def test_number_format_round_trips(tmp_path, capsys):
    path = tmp_path / "c.csv"
    run(["generate", "circle", "--n", 7, "-o", path], capsys)
    text = path.read_text()
    t = 2 * np.pi * np.arange(7) / 7
    expected = np.c_[np.cos(t), np.sin(t)]
    assert np.array_equal(parse_cloud(text).points, expected)
    cells = [c for line in text.splitlines()[1:] for c in line.split(",")]
    # shortest round-trip form, and no negative zero
    assert all(c == repr(float(c)) and c != "-0.0" for c in cells)
