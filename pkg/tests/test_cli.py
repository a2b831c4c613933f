"""Command-line interface: artifacts, determinism, exit codes."""

import json

import numpy as np
import pytest

from hiprox.cli import RunConfig, load_config, main


@pytest.fixture(autouse=True)
def _in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_list_problems(capsys):
    assert main(["list-problems"]) == 0
    out = capsys.readouterr().out
    for name in ("quartic-1d", "neglog-sep", "ball-quadratic"):
        assert name in out


def test_run_plain_writes_artifacts(tmp_path):
    code = main(
        ["run", "--problem", "quartic-1d", "--mode", "plain", "--eps", "1e-6",
         "--max-outer", "200", "--out", "runA"]
    )
    assert code == 0
    outer = (tmp_path / "runA" / "outer.csv").read_text()
    summary = json.loads((tmp_path / "runA" / "summary.json").read_text())
    assert summary["status"] == "converged"
    assert summary["problem"] == "quartic-1d"
    assert summary["final_gap"] <= 1e-6
    assert outer.splitlines()[0] == "k,F,gap,bound_rhs,inner_iters,cert_lhs,cert_rhs"

    code = main(
        ["run", "--problem", "quartic-1d", "--mode", "plain", "--eps", "1e-6",
         "--max-outer", "200", "--out", "runB"]
    )
    assert code == 0
    assert (tmp_path / "runB" / "outer.csv").read_bytes() == (
        tmp_path / "runA" / "outer.csv"
    ).read_bytes()


def test_run_default_outdir(tmp_path):
    code = main(["run", "--problem", "quartic-1d", "--mode", "plain", "--eps", "1e-6",
                 "--max-outer", "200"])
    assert code == 0
    assert (tmp_path / "runs" / "quartic-1d-plain-p3" / "outer.csv").exists()


def test_run_bilevel_writes_inner_traces(tmp_path):
    code = main(
        ["run", "--problem", "neglog-sep", "--mode", "bilevel", "--p", "3",
         "--eps", "1e-6", "--max-outer", "100", "--out", "runC"]
    )
    assert code == 0
    assert (tmp_path / "runC" / "inner_k1.csv").exists()
    summary = json.loads((tmp_path / "runC" / "summary.json").read_text())
    assert summary["mode"] == "bilevel"
    assert summary["status"] == "converged"


def test_example1_scan(tmp_path):
    code = main(["run", "--mode", "example1", "--out", "ex1"])
    assert code == 0
    lines = (tmp_path / "ex1" / "scan.csv").read_text().strip().split("\n")
    # header plus a 1e-4 grid on [0, 2.5] for each of the two anchors
    assert len(lines) == 1 + 2 * 25001
    assert lines[0] == "anchor,point,subgradient,lhs,rhs,accepted"
    summary = json.loads((tmp_path / "ex1" / "summary.json").read_text())
    assert summary["beta"] == 0.85
    lo, hi = summary["anchor=1.4"]
    np.testing.assert_allclose(lo, 1.4 - 1.85 ** (1.0 / 3.0), rtol=1e-10)
    np.testing.assert_allclose(hi, 1.4 - 0.15 ** (1.0 / 3.0), rtol=1e-10)
    # grid labels agree with the closed-form window at grid resolution
    accepted = [
        float(row.split(",")[1])
        for row in lines[1:]
        if row.startswith("1.4,") and row.endswith(",1")
    ]
    assert abs(min(accepted) - lo) <= 1.01e-4
    assert abs(max(accepted) - hi) <= 1.01e-4


def test_example2_scan(tmp_path):
    code = main(["run", "--mode", "example2", "--out", "ex2"])
    assert code == 0
    summary = json.loads((tmp_path / "ex2" / "summary.json").read_text())
    assert summary["criterion_passing"] > 0
    assert summary["accepted_of_passing"] == summary["criterion_passing"]
    np.testing.assert_allclose(summary["m_scaled"], 456.0)
    np.testing.assert_allclose(summary["h"], 76.0)
    lines = (tmp_path / "ex2" / "scan.csv").read_text().strip().split("\n")
    assert len(lines) == 1 + 2001


def test_verify_suite(capsys):
    assert main(["verify", "lemma1"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_rates_table(capsys, tmp_path):
    code = main(["rates", "--problems", "quartic-1d", "--modes", "plain",
                 "--p", "3", "--max-outer", "60", "--out", "r"])
    assert code == 0
    out = capsys.readouterr().out
    assert "bound_ok" in out and "yes" in out
    table = (tmp_path / "r" / "rates.csv").read_text().strip().split("\n")
    assert table[0].startswith("problem,mode,p,")
    assert len(table) == 2


def test_print_config_and_precedence(tmp_path, capsys):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"problem": "quartic-1d", "eps": 1e-4, "p": 3}))
    code = main(["run", "--config", str(cfg_file), "--eps", "0.01", "--print-config"])
    assert code == 0
    shown = json.loads(capsys.readouterr().out)
    assert shown["problem"] == "quartic-1d"
    assert shown["eps"] == 0.01
    assert shown["mode"] == "plain"


def test_config_validation_exit_codes(tmp_path, capsys):
    # bilevel mode must derive H itself
    assert main(["run", "--mode", "bilevel", "--h", "3.0"]) == 1
    # p below the quadratic regularization floor
    assert main(["run", "--p", "1"]) == 1
    # unknown problem name
    assert main(["run", "--problem", "nope"]) == 1
    # unknown config file keys
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"problem": "quartic-1d", "step_size": 0.1}))
    assert main(["run", "--config", str(bad)]) == 1
    capsys.readouterr()


def test_unknown_mode_is_a_parse_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--mode", "steepest"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nonsense"])
    assert exc.value.code == 1
    capsys.readouterr()


def test_iteration_limit_exit_code(capsys):
    code = main(["run", "--problem", "quartic-1d", "--mode", "plain",
                 "--eps", "1e-30", "--max-outer", "2"])
    assert code == 2
    capsys.readouterr()


def test_numerical_failure_exit_code(capsys):
    code = main(["run", "--problem", "quartic-sep-10d", "--mode", "plain",
                 "--max-inner", "1"])
    assert code == 3
    assert "numerical failure" in capsys.readouterr().err


def test_load_config_defaults():
    cfg = load_config(None, {})
    assert cfg == RunConfig()
    with pytest.raises(ValueError):
        RunConfig(mode="steepest").validate()
