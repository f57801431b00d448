import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from otreg.cli import EXIT_SOLVER_FAIL, EXIT_THRESHOLD_FAIL, main
from otreg.experiments import ConfigError, validate_config
from otreg.solver import load_solution

FAST_CONFIG = {
    "experiment": "engulfing",
    "domains": {"source": {"generator": "rectangle", "params": {"aspect": 1.0}}},
    "n_targets": 2000,
    "seed": 1,
    "params": {"h": 0.05, "t": 0.5, "t_bar": 0.75},
    "thresholds": {"min_s": 0.1},
}


def _write(tmp_path: Path, config: dict) -> str:
    p = tmp_path / "config.json"
    p.write_text(json.dumps(config))
    return str(p)


def test_solve_writes_solution(tmp_path):
    out = tmp_path / "sol.json"
    res = CliRunner().invoke(main, ["solve", "--config",
                                    _write(tmp_path, FAST_CONFIG),
                                    "--out", str(out)])
    assert res.exit_code == 0, res.output
    source, target, cloud, weights, psi, diagram = load_solution(str(out))
    assert cloud.n == 2000
    assert abs(diagram.areas.sum() - 1.0) < 1e-9


def test_run_pass(tmp_path):
    out_dir = tmp_path / "run"
    res = CliRunner().invoke(main, ["run", "--config",
                                    _write(tmp_path, FAST_CONFIG),
                                    "--out-dir", str(out_dir)])
    assert res.exit_code == 0, res.output
    assert "engulfing: PASS" in res.output
    report = json.loads((out_dir / "report.json").read_text())
    assert report["pass"] is True
    assert report["status"] == "ok"
    assert (out_dir / "solution.json").exists()


def test_run_threshold_failure_exit_code(tmp_path):
    bad = dict(FAST_CONFIG, thresholds={"min_s": 1.1})
    out_dir = tmp_path / "run"
    res = CliRunner().invoke(main, ["run", "--config", _write(tmp_path, bad),
                                    "--out-dir", str(out_dir)])
    assert res.exit_code == EXIT_THRESHOLD_FAIL
    report = json.loads((out_dir / "report.json").read_text())
    assert report["pass"] is False


def test_run_solver_failure_exit_code(tmp_path):
    # duplicate-heavy cloud: two targets collapse after sampling n=1 twice
    bad = dict(FAST_CONFIG)
    bad["domains"] = {"source": {"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]},
                      "target": {"vertices": [[0, 0], [1e-9, 0],
                                              [1e-9, 1e-9], [0, 1e-9]]}}
    out_dir = tmp_path / "run"
    res = CliRunner().invoke(main, ["run", "--config", _write(tmp_path, bad),
                                    "--out-dir", str(out_dir)])
    assert res.exit_code == EXIT_SOLVER_FAIL


def test_invalid_config_rejected(tmp_path):
    res = CliRunner().invoke(main, ["run", "--config",
                                    _write(tmp_path, {"experiment": "nope"}),
                                    "--out-dir", str(tmp_path / "x")])
    assert res.exit_code != 0
    with pytest.raises(ConfigError):
        validate_config({"experiment": "nope"})
    with pytest.raises(ConfigError):
        validate_config(dict(FAST_CONFIG, extra_key=1))
    rand = dict(FAST_CONFIG)
    rand["domains"] = {"source": {"generator": "random_hull",
                                  "params": {"n_points": 8}}}
    with pytest.raises(ConfigError):
        validate_config(rand)


def test_seed_override(tmp_path):
    cfg_path = _write(tmp_path, FAST_CONFIG)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    r1 = CliRunner().invoke(main, ["--seed", "9", "solve", "--config",
                                   cfg_path, "--out", str(a)])
    r2 = CliRunner().invoke(main, ["solve", "--config", cfg_path,
                                   "--out", str(b)])
    assert r1.exit_code == 0 and r2.exit_code == 0
    pa = json.loads(a.read_text())["points"]
    pb = json.loads(b.read_text())["points"]
    assert pa != pb


def test_report_aggregation(tmp_path):
    out_dir = tmp_path / "run"
    CliRunner().invoke(main, ["run", "--config",
                              _write(tmp_path, FAST_CONFIG),
                              "--out-dir", str(out_dir)])
    agg_path = tmp_path / "agg.json"
    res = CliRunner().invoke(main, ["report", "--dir", str(tmp_path),
                                    "--out", str(agg_path)])
    assert res.exit_code == 0, res.output
    agg = json.loads(agg_path.read_text())
    assert agg["n_runs"] == 1
    assert agg["pass"] is True
