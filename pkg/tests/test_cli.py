import csv
import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from fhalanay import ml_decay
from fhalanay.cli import dump_report, main, parse_args
from fhalanay.errors import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write_json(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def read_csv(path):
    raw = Path(path).read_bytes()
    assert b"\r\n" not in raw
    rows = list(csv.reader(raw.decode().splitlines()))
    return rows[0], np.array(rows[1:], dtype=float)


def test_ml_eval(capsys):
    code, out, _ = run(["ml", "eval", "--alpha", 1, "--x", -1], capsys)
    assert code == 0 and out == "0.367879441171442\n"
    code, out, _ = run(["ml", "eval", "--alpha", 0.5, "--beta", 1, "--x", -1], capsys)
    assert float(out) == pytest.approx(np.exp(1.0) * 0.15729920705028513, rel=1e-14)
    code, _, err = run(["ml", "eval", "--alpha", -1, "--x", 1], capsys)
    assert code == 1 and err.startswith("fhalanay: error:") and err.count("\n") == 1


def test_halanay_solve(capsys, tmp_path):
    code, out, _ = run(["halanay", "solve", "--params", CONFIGS / "halanay_example.json"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["feasible"] and rep["margin_exact"] == "1/10"
    assert rep["lambda_star"] == pytest.approx(0.023711201744779423, rel=1e-9)
    assert abs(rep["residual"]) <= 1e-10
    bad = write_json(tmp_path, "bad.json", {"alpha": 0.5, "a": 1, "b": 1, "c": 0, "d": 0, "e": 0})
    code, out, _ = run(["halanay", "solve", "--params", bad], capsys)
    assert code == 2 and json.loads(out)["verdict"] == "infeasible"


def test_linsys_analyze_and_csv(capsys, tmp_path):
    out_csv = tmp_path / "traj.csv"
    argv = ["linsys", "analyze", "--system", CONFIGS / "worked_example.json", "--simulate", "--T", 5, "--dt", 0.05,
            "--csv", out_csv]
    code, out, _ = run(argv, capsys)
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "globally attractive"
    assert rep["coefficients"] == {"a0": 1.4, "b0": 0.6, "c0": 0.7, "d0": 0.6, "e0": 0.4}
    assert rep["simulation"]["x_envelope"]["passed"] and rep["simulation"]["y_envelope"]["passed"]
    header, data = read_csv(out_csv)
    assert header == ["t", "x_1", "x_2", "y_1", "y_2", "y_3", "u_bound", "v_bound"]
    assert data.shape == (101, 8)
    np.testing.assert_allclose(data[:, 0], 0.05 * np.arange(101), atol=1e-12)
    np.testing.assert_allclose(data[0, 1:3], [1.0, -0.5], atol=1e-12)


def test_linsys_inconclusive(capsys, tmp_path):
    spec = json.loads((CONFIGS / "worked_example.json").read_text())
    spec["A"] = [[-0.5, 0.0], [0.0, -0.5]]
    code, out, _ = run(["linsys", "analyze", "--system", write_json(tmp_path, "weak.json", spec)], capsys)
    assert code == 2 and json.loads(out)["verdict"] == "inconclusive"


def test_nfde(capsys):
    code, out, _ = run(["nfde", "contract", "--params", CONFIGS / "neutral_contract.json"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["K"] == 3.0 and rep["M"] == 1.0
    assert rep["lambda_star"] == pytest.approx(0.21842245045611727, rel=1e-9)
    assert rep["mapped"]["feasible"] is False
    code, out, _ = run(["nfde", "dissipate", "--params", CONFIGS / "neutral_dissipate.json"], capsys)
    assert code == 0 and json.loads(out)["R"] == 2.0


def test_simulate_halanay_csv(capsys, tmp_path):
    spec = {"type": "halanay", "alpha": 0.7, "a": 2.0, "b": 0, "c": 0, "d": 0, "e": 0, "tau": 1.0, "phi": 1.0, "psi": 0.0}
    out_csv = tmp_path / "u.csv"
    code, out, _ = run(["simulate", "--system", write_json(tmp_path, "s.json", spec), "--dt", 0.01, "--T", 0.03,
                        "--out", out_csv], capsys)
    assert code == 0 and json.loads(out)["steps"] == 3
    lines = out_csv.read_text().splitlines()
    assert len(lines) == 5 and lines[0] == "t,u,v"
    header, data = read_csv(out_csv)
    assert data[0].tolist() == [0.0, 1.0, 0.0]
    code, _, _ = run(["simulate", "--system", write_json(tmp_path, "s.json", spec), "--dt", 0.01, "--T", 2,
                      "--out", out_csv], capsys)
    _, data = read_csv(out_csv)
    np.testing.assert_allclose(data[:, 1], ml_decay(0.7, 2.0, data[:, 0]), atol=1e-2)


def test_mesh_errors_and_auto_mesh(capsys, tmp_path):
    out_csv = tmp_path / "x.csv"
    argv = ["simulate", "--system", CONFIGS / "worked_example.json", "--dt", 0.03, "--T", 1, "--out", out_csv]
    code, _, err = run(argv, capsys)
    assert code == 1 and "nearest valid dt" in err and "--auto-mesh" in err and err.count("\n") == 1
    code, out, _ = run(argv + ["--auto-mesh"], capsys)
    assert code == 0 and json.loads(out)["dt"] == pytest.approx(0.025)


def test_deterministic_outputs(capsys, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"run{i}.csv"
        code, out, _ = run(["simulate", "--system", CONFIGS / "halanay_comparison.json", "--dt", 0.1, "--T", 5,
                            "--out", path], capsys)
        outs.append((out.replace(str(path), ""), path.read_bytes()))
    assert outs[0] == outs[1]


@pytest.mark.parametrize(
    "content, fragment",
    [
        (None, "file not found"),
        ("", "file is empty"),
        ("{not json", "invalid JSON"),
        ('{"alpha": 0.5, "a": "x", "b": 0, "c": 0, "d": 0, "e": 0}', "a: expected a number"),
        ('{"alpha": 0.5, "b": 0, "c": 0, "d": 0, "e": 0}', "a: missing required field"),
        ('{"alpha": 1.5, "a": 1, "b": 0, "c": 0, "d": 0, "e": 0}', "alpha"),
    ],
)
def test_config_errors(capsys, tmp_path, content, fragment):
    path = tmp_path / "p.json"
    if content is not None:
        path.write_text(content)
    code, out, err = run(["halanay", "solve", "--params", path], capsys)
    assert code == 1 and out == ""
    assert fragment in err and err.count("\n") == 1


def test_argument_errors(capsys):
    code, _, err = run(["halanay", "solve"], capsys)
    assert code == 1 and "--params" in err
    code, _, err = run(["linsys", "analyze", "--system", CONFIGS / "worked_example.json", "--tol", -1], capsys)
    assert code == 1 and "--tol" in err
    with pytest.raises(ConfigError):
        parse_args(["bogus"])


def test_dump_report_is_canonical():
    text = dump_report({"b": 1.0, "a": float("inf"), "c": [np.float64(0.5)]})
    assert text == '{\n  "a": "inf",\n  "b": 1.0,\n  "c": [\n    0.5\n  ]\n}\n'


def test_console_script_and_log_env(tmp_path):
    env = dict(os.environ, FHALANAY_LOG="INFO")
    argv = [sys.executable, "-m", "fhalanay.cli", "simulate", "--system", str(CONFIGS / "worked_example.json"),
            "--dt", "0.03", "--T", "1", "--auto-mesh", "--out", str(tmp_path / "x.csv")]
    res = subprocess.run(argv, capture_output=True, text=True, env=env)
    assert res.returncode == 0
    assert "auto-mesh" in res.stderr
    res = subprocess.run(argv, capture_output=True, text=True, env=dict(os.environ, FHALANAY_LOG="WARNING"))
    assert res.returncode == 0 and res.stderr == ""


@pytest.mark.parametrize(
    "name, definition",
    [
        ("worked_example.json", "linear_system"),
        ("halanay_example.json", "halanay_solve"),
        ("halanay_comparison.json", "halanay_simulation"),
        ("neutral_contract.json", "neutral"),
        ("neutral_dissipate.json", "neutral"),
        ("neutral_dissipate_conforming.json", "neutral"),
    ],
)
def test_shipped_configs_match_schema(name, definition):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((CONFIGS.parent / "docs" / "schema.json").read_text())
    sub = {"$ref": f"#/$defs/{definition}", "$defs": schema["$defs"]}
    jsonschema.validate(json.loads((CONFIGS / name).read_text()), sub)
