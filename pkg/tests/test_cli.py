import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from stability_lab.cli import ConfigError, main, parse_chi, parse_grid, parse_pair, to_csv, to_json

GOLDEN = Path(__file__).parent / "golden"


def run_cli(argv, cwd=GOLDEN):
    return subprocess.run([sys.executable, "-m", "stability_lab", *argv], cwd=cwd,
                          capture_output=True, text=True, timeout=300)


@pytest.mark.parametrize("case", json.loads((GOLDEN / "scenarios.json").read_text()),
                         ids=lambda c: c["name"])
def test_golden_exit_codes(case):
    out = run_cli(case["argv"])
    assert out.returncode == case["exit"], out.stdout + out.stderr
    for text in case.get("stdout", []):
        assert text in out.stdout
    for text in case.get("stderr", []):
        assert text in out.stderr


# parsing

def test_parse_grid_forms():
    assert parse_grid("1,2.5,4") == [1.0, 2.5, 4.0]
    g = parse_grid("10:1000:logx3")
    assert g == pytest.approx([10, 100, 1000], rel=1e-14)
    assert parse_grid("0:1:lin5") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_grid(7) == [7.0]
    assert parse_grid([1, 2]) == [1.0, 2.0]


@pytest.mark.parametrize("bad", ["1:2", "0:10:logx4", "1:10:cheb4", "5:1:lin3", "1:10:logx1"])
def test_parse_grid_rejects(bad):
    with pytest.raises(ConfigError):
        parse_grid(bad)


def test_parse_pair_and_chi():
    assert parse_pair("0.5:20", "x") == (0.5, 20.0)
    with pytest.raises(ConfigError):
        parse_pair("0.5", "x")
    chi = parse_chi("5:3")
    assert chi.max_value == 1 and chi.breakpoints == (5.0,)
    with pytest.raises(ConfigError):
        parse_chi("5")


# formats

def test_json_float_round_trip():
    x = 0.1 + 0.2
    doc = json.loads(to_json({"x": x, "inf": math.inf, "n": None, "ok": True, "v": [1, 2.5]}))
    assert doc["x"] == x
    assert doc["inf"] == "Infinity"
    assert doc["n"] is None and doc["ok"] is True and doc["v"] == [1, 2.5]


def test_csv_layout():
    text = to_csv(["s", "v"], [[1.0, None], [0.1 + 0.2, math.inf]])
    assert text == "s,v\n1,\n0.30000000000000004,inf\n"


def test_json_artifact(tmp_path, capsys):
    out = tmp_path / "mpr.json"
    code = main(["inequality", "mpr", "--metric", "euclidean", "--potential", "zero", "--b", "1",
                 "--a", "0.3", "--s", "10", "-o", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == 1 and doc["command"] == "inequality-mpr"
    rep = doc["reports"][0]
    assert rep["rhs"] == pytest.approx(math.pi, abs=1e-12)
    assert rep["slack"] == rep["rhs"] - rep["lhs"]
    assert "PASS inequality-mpr" in capsys.readouterr().out


def test_rho_csv(tmp_path):
    out = tmp_path / "rho.csv"
    code = main(["rho", "--metric", "schoen:0.5", "--a", "0.25", "--b", "1", "--delta", "0.5",
                 "--s-grid", "10:1000:logx32", "--format", "csv", "-o", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "s,rho_plus,ratio" and len(lines) == 33
    assert abs(float(lines[-1].split(",")[2]) - 1) <= 0.02


def test_config_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"metric": "euclidean", "a": 0.25, "s": "1,2"}))
    assert main(["lambda1", "--config", str(cfg), "--a", "0", "--s", "1"]) == 0
    out = capsys.readouterr().out
    assert "s=1 lambda1=5.78318" in out and "s=2 " not in out


@pytest.mark.parametrize(
    "argv",
    [
        ["inequality", "cm", "--a", "-1", "--s", "4"],
        ["inequality", "cm", "--a", "0.25"],
        ["inequality", "cm", "--a", "0.25", "--s", "4", "--b", "0.5"],
        ["inequality", "estimate", "--a", "0.125", "--b", "1", "--delta", "1", "--s", "3.5"],
        ["inequality", "huber", "--s0", "1", "--s1", "3", "--s2", "12", "--s", "10"],
        ["lambda1", "--metric", "sphere:1", "--a", "0", "--s", "4"],
        ["geometry", "--metric", "torus", "--s", "1"],
        ["a0", "--config", "/nonexistent/cfg.json"],
        ["distance", "--metric", "euclidean", "--potential", "zero"],
        ["suite", "--draws", "0"],
        ["nonsense"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_invalid_json_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["a0", "--config", str(bad)]) == 2


def test_mpr_hypothesis_not_met_is_informational(capsys):
    code = main(["inequality", "mpr", "--potential", "constant:1", "--s", "10"])
    assert code == 0
    assert "hypothesis not met" in capsys.readouterr().out


def test_distance_flat_cli(capsys):
    assert main(["distance", "--potential", "constant:4"]) == 0
    line = [l for l in capsys.readouterr().out.splitlines() if "s_star" in l][0]
    s_star = float(line.split("s_star=")[1].split()[0])
    assert abs(s_star * 2 - 4) <= 0.04


def test_geometry_checks(capsys):
    assert main(["geometry", "--metric", "hyperbolic:1", "--s-grid", "0.1:8:lin9"]) == 0
    out = capsys.readouterr().out
    assert "PASS geometry shiohama-tanaka" in out and "PASS geometry gauss-bonnet" in out


def test_curvature_report_cli(capsys):
    assert main(["curvature-report", "--metric", "sphere:1", "--rmax", "3.1"]) == 0


# determinism

def test_suite_byte_identical(tmp_path):
    paths = []
    for i, jobs in enumerate(("1", "1", "2")):
        p = tmp_path / f"suite{i}.json"
        assert main(["suite", "--draws", "16", "--seed", "5", "--jobs", jobs, "-o", str(p)]) == 0
        paths.append(p.read_bytes())
    assert paths[0] == paths[1] == paths[2]


def test_suite_csv_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        main(["suite", "--draws", "8", "--seed", "9", "--format", "csv", "-o", str(p)])
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()


def test_suite_jobs_env(tmp_path, monkeypatch):
    monkeypatch.setenv("STABILITY_LAB_JOBS", "2")
    p = tmp_path / "s.json"
    assert main(["suite", "--draws", "4", "-o", str(p)]) == 0
    assert len(json.loads(p.read_text())["draws"]) == 4
