import json
import math
import subprocess
import sys

import pytest

from cone_spectra.cli import main
from cone_spectra.io import loads, read_csv

CIRCLE_PI4 = json.dumps({"kind": "circle", "theta": math.pi / 4})
FLAT = json.dumps({"kind": "constant", "length": 2 * math.pi, "kappa": 0.0})


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def test_curve_circle_summary(tmp_path):
    assert run(tmp_path, "curve", "--spec", '{"kind":"circle","theta":0.5236}') == 0
    summary = loads((tmp_path / "curve_summary.json").read_text())
    assert summary["length"] == pytest.approx(math.pi, abs=1e-4)
    assert abs(summary["gauss_bonnet_residual"]) < 1e-6
    header, rows = read_csv((tmp_path / "profile.csv").read_text())
    assert header == ["s", "kappa"] and len(rows) == 2048


def test_curve_repeated_point_exits_3(tmp_path):
    pts = [[math.cos(t), math.sin(t), 0.0] for t in [0.1 * i for i in range(10)]]
    pts.append(pts[2])
    assert run(tmp_path, "curve", "--spec", json.dumps({"kind": "samples", "points": pts})) == 3


def test_curve_synthetic_plateaus(tmp_path):
    spec = json.dumps({"kind": "synthetic", "length": 2 * math.pi, "windows": {"m": 5, "eps": 0.02}})
    assert run(tmp_path, "curve", "--spec", spec) == 0
    _, rows = read_csv((tmp_path / "profile.csv").read_text())
    assert max(float(r[1]) for r in rows) == pytest.approx(1 / math.tan(0.02), rel=1e-12)


def test_curve_reads_file(tmp_path):
    path = tmp_path / "loop.json"
    path.write_text(CIRCLE_PI4)
    assert run(tmp_path, "curve", "--in", str(path), "--format", "json") == 0
    assert (tmp_path / "profile.json").exists()


@pytest.mark.parametrize("argv", [["curve", "--spec", "{oops"], ["curve"], ["ks", "--spec", CIRCLE_PI4, "--n", "1000"],
                                  ["count", "--spec", CIRCLE_PI4, "--emin", "1e-3", "--emax", "1e-6"]])
def test_bad_input_exits_2(tmp_path, argv):
    assert run(tmp_path, *argv) == 2


def test_ks_circle(tmp_path):
    assert run(tmp_path, "ks", "--spec", CIRCLE_PI4) == 0
    doc = loads((tmp_path / "spectrum.json").read_text())
    assert doc["k_S"] == pytest.approx(1 / (4 * math.pi), abs=1e-6)
    assert doc["negative"] == pytest.approx([-0.25], abs=1e-6)


def test_ks_flat_warns(tmp_path, capsys):
    assert run(tmp_path, "ks", "--spec", FLAT) == 0
    assert "great circle" in capsys.readouterr().err
    assert loads((tmp_path / "spectrum.json").read_text())["k_S"] == 0.0


def test_ks_perturbed_above_bound(tmp_path):
    spec = json.dumps({"kind": "fourier", "theta0": 1.0, "coeffs": [[0.05, 0.0], [0.0, 0.04]]})
    assert run(tmp_path, "ks", "--spec", spec) == 0
    doc = loads((tmp_path / "spectrum.json").read_text())
    assert doc["k_S"] > doc["isoperimetric_bound"] + doc["k_S_error"]


def test_ks_zero_eigenvalue_exits_4(tmp_path):
    spec = json.dumps({"kind": "constant", "length": 2 * math.pi, "kappa": 2.0})
    assert run(tmp_path, "ks", "--spec", spec) == 4


@pytest.mark.parametrize("model", ["layer-D", "delta"])
def test_count_slope(tmp_path, model):
    assert run(tmp_path, "count", "--spec", CIRCLE_PI4, "--model", model) == 0
    slope = loads((tmp_path / "slope.json").read_text())
    assert slope["slope"] == pytest.approx(1 / (4 * math.pi), rel=0.15)
    header, rows = read_csv((tmp_path / "counting.csv").read_text())
    assert header == ["E", "N", "uncertainty"] and len(rows) == 49


def test_count_flat_is_zero(tmp_path):
    assert run(tmp_path, "count", "--spec", FLAT, "--model", "layer-N") == 0
    _, rows = read_csv((tmp_path / "counting.csv").read_text())
    assert {r[1] for r in rows} == {"0"}


def test_model1d(tmp_path):
    assert run(tmp_path, "model1d", "--L", "5", "--bc", "N") == 0
    doc = loads((tmp_path / "model1d.json").read_text())
    assert doc["lambda1"] < -0.25
    assert doc["finite_difference"]["lambda1"] == pytest.approx(doc["lambda1"], abs=1e-6)


def test_validate_quick(tmp_path, capsys):
    assert run(tmp_path, "validate", "--quick") == 0
    lines = (tmp_path / "reports.jsonl").read_text().splitlines()
    assert len(lines) == 9 and all(json.loads(line)["schema"] == 1 for line in lines)
    assert "circle_closed_forms" in capsys.readouterr().out


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "cone_spectra", "model1d", "--L", "2", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
