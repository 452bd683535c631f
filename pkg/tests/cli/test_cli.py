import os
import numpy as np
import pandas as pd
import pytest

from lagrangefsi.cli import build_parser, main

QUICK_RUN = """
[geometry]
h = 0.25

[numerics]
t_end = 0.02
dt = 0.01
eps_pen = 0.01

[data]
initial_data = zero
"""

@pytest.fixture
def quick_config(tmp_path):
    path = tmp_path / "quick.ini"
    path.write_text(QUICK_RUN, encoding="utf-8")
    return str(path)

def test_usage_errors_exit_2(tmp_path):
    assert main(["teleport"]) == 2
    assert main(["run", "--frobnicate"]) == 2
    assert main([]) == 2
    assert main(["sweep-kappa", "--kappa", "0.1,-1", "--out", str(tmp_path)]) == 2

def test_help_exits_0():
    assert main(["--help"]) == 0

def test_configuration_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[numerics]\nkappa = -1\n", encoding="utf-8")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "out"), "--quiet"]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.ini"), "--quiet"]) == 2
    assert not os.path.exists(tmp_path / "out")

def test_run_writes_every_output(tmp_path, quick_config):
    out = tmp_path / "out"
    assert main(["run", "--config", quick_config, "--out", str(out), "--quiet"]) == 0
    for name in ("config_echo.ini", "summary.txt", "timing.txt", "mesh.txt", os.path.join("run", "series.csv")):
        assert os.path.exists(out / name)
    with open(out / "summary.txt", encoding="utf-8") as f:
        summary = f.read().splitlines()
    assert summary[0] == "verdict.run_completed = PASS t_star=0.02"
    assert "passed = true" in summary
    assert "finish_reason = finished" in summary

def test_check_compat_of_zero_data(tmp_path, quick_config):
    assert main(["check-compat", "--config", quick_config, "--out", str(tmp_path / "compat"), "--quiet"]) == 0

def test_parser_overrides():
    args = build_parser().parse_args(["sweep-kappa", "--kappa", "0.1, 0.01"])
    assert args.kappa == [0.1, 0.01]
    args = build_parser().parse_args(["verify", "--check", "stepper", "--check", "mms"])
    assert args.check == ["stepper", "mms"]

def test_zero_data_series_is_all_zero(tmp_path, quick_config):
    out = tmp_path / "out"
    assert main(["run", "--config", quick_config, "--out", str(out), "--quiet"]) == 0
    series = pd.read_csv(out / "run" / "series.csv", comment="#")
    assert list(series["step"]) == [0, 1, 2]
    assert np.allclose(series["min_det"], 1.0)
    diagnostics = series.drop(columns=["step", "t", "min_det"])
    assert np.abs(diagnostics.to_numpy()).max() <= 1e-12
