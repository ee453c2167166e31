import numpy as np
import pytest

from pipeflow import FlowConfig, grids_from_config
from pipeflow.cli import run_command
from pipeflow.io import (read_forcing_json, read_report, write_csv,
                         write_field_csv, read_field_csv, write_forcing_json,
                         write_report)
from pipeflow.sampling import random_forcing, rng_from_seed

FAST = ["--config"]  # placeholder, tests build their own configs


@pytest.fixture()
def fast_cfg(tmp_path):
    p = tmp_path / "fast.cfg"
    p.write_text("n_r = 32\nn_z = 64\nhalf_period = 8\nphi = 100\n")
    return str(p)


def test_no_arguments_usage_error(capsys):
    assert run_command([]) == 2
    assert "usage" in capsys.readouterr().err.lower()


def test_unknown_subcommand(capsys):
    assert run_command(["frobnicate"]) == 2


def test_missing_config_file():
    assert run_command(["check-inequalities", "--config", "/nope.cfg"]) == 2


def test_check_inequalities_end_to_end(tmp_path, fast_cfg):
    out = tmp_path / "reports"
    code = run_command(["check-inequalities", "--config", fast_cfg,
                        "--out", str(out), "--seed", "0"])
    assert code == 0
    for name in ("inequality_poincare.json", "inequality_hlp.json",
                 "inequality_interpolation.json"):
        data = read_report(out / name)
        assert data["violations"] == 0


def test_sweep_phi_cli(tmp_path, fast_cfg):
    out = tmp_path / "sweep"
    code = run_command(["sweep-phi", "--case", "Fr->v:L2",
                        "--phis", "100,1000,10000", "--samples", "3",
                        "--config", fast_cfg, "--out", str(out)])
    assert code == 0
    json_files = list(out.glob("sweep_*.json"))
    csv_files = list(out.glob("sweep_*.csv"))
    assert len(json_files) == 1 and len(csv_files) == 1
    data = read_report(json_files[0])
    assert data["case"] == "Fr→v:L2"
    assert len(data["worst_ratios"]) == 3


def test_sweep_phi_bad_case(tmp_path, fast_cfg, capsys):
    code = run_command(["sweep-phi", "--case", "nope", "--phis", "1,2,3",
                        "--config", fast_cfg, "--out", str(tmp_path)])
    assert code == 2
    assert "supported tags" in capsys.readouterr().err


def test_solve_linear_cli(tmp_path, fast_cfg):
    out = tmp_path / "lin"
    code = run_command(["solve-linear", "--config", fast_cfg, "--out", str(out),
                        "--verbose"])
    assert code == 0
    assert (out / "norms.json").exists()
    assert (out / "state.json").exists()
    assert (out / "mode_diagnostics.csv").exists()


def test_calibrate_cli(tmp_path, fast_cfg):
    out = tmp_path / "cal"
    code = run_command(["calibrate", "--config", fast_cfg, "--samples", "4",
                        "--out", str(out)])
    assert code == 0
    data = read_report(out / "calibration.json")
    assert data["c1_cal"] > 0 and data["c2_cal"] > 0
    from pipeflow import load_config
    cal = load_config(out / "calibrated.cfg")
    assert cal.c1_cal == pytest.approx(data["c1_cal"])


# ------------------------------------------------------------ write_report

def test_write_report_deterministic(tmp_path):
    rep = {"b": 0.1, "a": [1.0 / 3.0, 2, True, None], "nested": {"x": 1e-300}}
    p1, p2 = tmp_path / "r1.json", tmp_path / "r2.json"
    write_report(rep, p1)
    write_report(rep, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_write_report_missing_directory(tmp_path):
    with pytest.raises(FileNotFoundError, match="directory"):
        write_report({"a": 1.0}, tmp_path / "absent" / "r.json")


def test_write_report_17_digits(tmp_path):
    p = tmp_path / "digits.json"
    write_report({"v": 0.1}, p)
    assert "0.10000000000000001" in p.read_text()


def test_csv_writer(tmp_path):
    p = tmp_path / "t.csv"
    write_csv(p, ["a", "b"], [(1.5, "x"), (2.0, "y")])
    lines = p.read_text().splitlines()
    assert lines[0] == "a,b"
    assert lines[1].startswith("1.5")


# ----------------------------------------------------------- field files

def test_field_csv_roundtrip(tmp_path, small_grid, small_modes, rng):
    vals = rng.standard_normal((small_grid.n, small_modes.n_z))
    p = tmp_path / "field.csv"
    write_field_csv(p, small_grid, small_modes, vals)
    header = p.read_text().splitlines()[0]
    assert header == "r,z,value"
    back = read_field_csv(p, small_grid, small_modes)
    np.testing.assert_allclose(back, vals, rtol=1e-15)


def test_forcing_json_roundtrip(tmp_path, small_grid, small_modes):
    f = random_forcing(rng_from_seed(0), small_grid, small_modes)
    p = tmp_path / "forcing.json"
    write_forcing_json(p, small_grid, small_modes, f)
    back = read_forcing_json(p, small_grid, small_modes)
    for a, b in zip(f.components, back.components):
        np.testing.assert_allclose(a, b, atol=1e-14)


def test_solve_linear_with_forcing_file(tmp_path, fast_cfg):
    cfg = FlowConfig(n_r=32, n_z=64, half_period=8.0)
    grid, modes = grids_from_config(cfg)
    f = random_forcing(rng_from_seed(1), grid, modes, support=2.0)
    fpath = tmp_path / "f.json"
    write_forcing_json(fpath, grid, modes, f)
    out = tmp_path / "out"
    code = run_command(["solve-linear", "--config", fast_cfg,
                        "--forcing", str(fpath), "--out", str(out)])
    assert code == 0
    assert (out / "norms.json").exists()


def test_complex_field_csv_roundtrip(tmp_path, small_grid, small_modes, rng):
    from pipeflow.io import read_complex_field_csv, write_complex_field_csv
    vals = rng.standard_normal((small_grid.n, small_modes.n_z)) \
        + 1j * rng.standard_normal((small_grid.n, small_modes.n_z))
    p = tmp_path / "cfield.csv"
    write_complex_field_csv(p, small_grid, small_modes, vals)
    assert p.read_text().splitlines()[0] == "r,z,re,im"
    back = read_complex_field_csv(p, small_grid, small_modes)
    np.testing.assert_allclose(back, vals, rtol=1e-15)


def test_mode_diagnostics_rows(small_grid, small_modes):
    from pipeflow import hagen_poiseuille, linear_solve_T
    from pipeflow.nonlinear import ModeOperatorSet
    base = hagen_poiseuille(50.0, small_grid)
    ops = ModeOperatorSet(base, small_grid, small_modes)
    f = random_forcing(rng_from_seed(2), small_grid, small_modes)
    diag = []
    linear_solve_T(f, base, small_grid, small_modes, ops, diagnostics=diag)
    # one stream row and one swirl row per solved mode, residuals tiny
    assert len(diag) == 2 * len(small_modes.solve_k)
    for label, xi, residual, cond in diag:
        assert label in ("stream", "swirl")
        assert residual <= 1e-8
        assert cond >= 1.0


def test_thread_pool_determinism(small_grid, small_modes, monkeypatch):
    from pipeflow import hagen_poiseuille, linear_solve_T
    f = random_forcing(rng_from_seed(9), small_grid, small_modes)
    base = hagen_poiseuille(75.0, small_grid)
    monkeypatch.delenv("PIPEFLOW_THREADS", raising=False)
    sequential = linear_solve_T(f, base, small_grid, small_modes)
    monkeypatch.setenv("PIPEFLOW_THREADS", "4")
    threaded = linear_solve_T(f, base, small_grid, small_modes)
    np.testing.assert_array_equal(sequential.psi_modes, threaded.psi_modes)
    np.testing.assert_array_equal(sequential.swirl_modes, threaded.swirl_modes)


def test_solve_nonlinear_cli(tmp_path, fast_cfg):
    out = tmp_path / "nl"
    code = run_command(["solve-nonlinear", "--config", fast_cfg,
                        "--out", str(out), "--seed", "2"])
    assert code == 0
    data = read_report(out / "iteration.json")
    assert data["status"] == "converged"
    res = read_report(out / "momentum_residual.json")
    assert res["curl_theta_relative"] <= 1e-5
    assert (out / "residuals.csv").exists()


def test_decay_fit_cli(tmp_path):
    cfg = tmp_path / "decay.cfg"
    cfg.write_text("n_r = 48\nphi = 100\n")  # n_z upgraded to 512 internally
    out = tmp_path / "dec"
    code = run_command(["decay-fit", "--config", str(cfg), "--window", "5,12",
                        "--out", str(out), "--seed", "3"])
    assert code == 0
    data = read_report(out / "decay.json")
    assert data["alpha_total"] > 0
    assert data["r_squared_total"] >= 0.99


def test_uniqueness_probe_cli(tmp_path, fast_cfg):
    out = tmp_path / "uni"
    code = run_command(["uniqueness-probe", "--config", fast_cfg,
                        "--seeds", "2", "--out", str(out), "--seed", "1"])
    assert code == 0
    data = read_report(out / "uniqueness.json")
    assert data["n_failed"] == 0
    assert data["max_pairwise_distance"] <= 1e-6
