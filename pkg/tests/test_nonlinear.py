import numpy as np
import pytest

from pipeflow import (FlowConfig, ForcingField, contraction_set_check,
                      fixed_point_defect, linear_solve_T, hagen_poiseuille,
                      momentum_curl_residual, picard_solve, uniqueness_probe,
                      calibrate_constants)
from pipeflow.fields import StreamState, inverse_transform, velocity_from_stream
from pipeflow.nonlinear import ModeOperatorSet
from pipeflow.norms import state_l2r, weighted_l2
from pipeflow.sampling import normalized_forcing, rng_from_seed


@pytest.fixture(scope="module")
def run_config():
    return FlowConfig(phi=100.0)


@pytest.fixture(scope="module")
def run_grid_modes(run_config):
    from pipeflow import grids_from_config
    return grids_from_config(run_config)


@pytest.fixture(scope="module")
def small_forcing(run_config, run_grid_modes):
    grid, modes = run_grid_modes
    rng = rng_from_seed(3)
    return normalized_forcing(rng, grid, modes, run_config.phi ** (1 / 96.0),
                              z_profile="gauss")


@pytest.fixture(scope="module")
def converged(run_config, run_grid_modes, small_forcing):
    grid, modes = run_grid_modes
    return picard_solve(small_forcing, run_config, grid, modes)


# --------------------------------------------------------- linear solve T

def test_T_zero_forcing(run_grid_modes):
    grid, modes = run_grid_modes
    base = hagen_poiseuille(100.0, grid)
    F = ForcingField.zero(grid, modes)
    state = linear_solve_T(F, base, grid, modes)
    assert np.max(np.abs(state.psi_modes)) == 0.0
    assert np.max(np.abs(state.swirl_modes)) == 0.0


def test_T_constant_swirl_forcing(run_grid_modes):
    grid, modes = run_grid_modes
    base = hagen_poiseuille(100.0, grid)
    zero = np.zeros((grid.n, modes.n_z))
    F = ForcingField.from_components(zero, 3.0 * np.ones_like(zero), zero, modes)
    state = linear_solve_T(F, base, grid, modes)
    vt = inverse_transform(state.swirl_modes, modes)
    r = grid.nodes
    assert np.max(np.abs(vt - (r * (1 - r))[:, None])) <= 1e-10
    assert np.max(np.abs(state.psi_modes)) == 0.0


def test_T_manufactured_round_trip(run_grid_modes):
    # forcing built from the operator image of a known state (no mode-0
    # stream content, so Fr = image / (i xi))
    grid, modes = run_grid_modes
    base = hagen_poiseuille(100.0, grid)
    ops = ModeOperatorSet(base, grid, modes)
    r = grid.nodes
    prof = (r**3 * (1 - r) ** 2).astype(complex)
    psi_target = np.zeros((grid.n, modes.n_z), complex)
    fr_hat = np.zeros((grid.n, modes.n_z), complex)
    for k in (1, 2, 5):
        col = modes.column_of(k)
        xi = modes.frequencies[col]
        image = ops.stream[k].matrix @ (prof / k)
        image[list(ops.stream[k].constrained)] = 0.0
        psi_target[:, col] = prof / k
        fr_hat[:, col] = image / (1j * xi)
        psi_target[:, modes.column_of(-k)] = np.conj(prof / k)
        fr_hat[:, modes.column_of(-k)] = np.conj(fr_hat[:, col])
    fr = inverse_transform(fr_hat, modes)
    zero = np.zeros_like(fr)
    F = ForcingField.from_components(fr, zero, zero, modes)
    state = linear_solve_T(F, base, grid, modes, ops)
    assert np.max(np.abs(state.psi_modes - psi_target)) <= 1e-7 * np.max(np.abs(psi_target))


def test_T_reality_symmetry(run_grid_modes, small_forcing):
    grid, modes = run_grid_modes
    base = hagen_poiseuille(100.0, grid)
    state = linear_solve_T(small_forcing, base, grid, modes)
    assert state.reality_defect(modes) == 0.0  # exact by conjugate mirroring


# ------------------------------------------------------------ picard solve

def test_picard_zero_forcing_immediate(run_config, run_grid_modes):
    grid, modes = run_grid_modes
    state, report = picard_solve(ForcingField.zero(grid, modes), run_config,
                                 grid, modes)
    assert report.converged
    assert report.iterations == 1
    assert state_l2r(state, grid, modes) == 0.0


def test_picard_converges_small_data(converged, run_config):
    state, report = converged
    assert report.status == "converged"
    assert report.residuals[-1] <= run_config.picard_tol


def test_picard_matches_damped_run(run_config, run_grid_modes, small_forcing,
                                   converged):
    # independent damped fixed-point run from a perturbed seed reaches the
    # same state
    grid, modes = run_grid_modes
    state, _ = converged
    from pipeflow.sampling import random_stream_state
    noise = random_stream_state(rng_from_seed(77), grid, modes)
    seed_state = state + noise.scaled(1e-4 / max(state_l2r(noise, grid, modes), 1e-30))
    damped = run_config.replace(relaxation=0.7)
    state2, report2 = picard_solve(small_forcing, damped, grid, modes,
                                   initial=seed_state)
    assert report2.converged
    dv = velocity_from_stream(state - state2, grid, modes)
    from pipeflow.norms import sobolev_norm
    assert sobolev_norm(dv, 19 / 12, grid, modes) <= 1e-6


def test_picard_divergence_reported(run_grid_modes):
    # tiny flux with a huge forcing leaves the contraction regime; the
    # solver must report rather than raise
    grid, modes = run_grid_modes
    config = FlowConfig(phi=0.05, picard_max_iter=40)
    rng = rng_from_seed(5)
    F = normalized_forcing(rng, grid, modes, 5e4)
    state, report = picard_solve(F, config, grid, modes)
    assert report.status in ("diverged", "max-iter")


def test_fixed_point_consistency(run_config, run_grid_modes, small_forcing, converged):
    grid, modes = run_grid_modes
    state, _ = converged
    defect = fixed_point_defect(state, small_forcing, run_config, grid, modes)
    assert defect <= 10 * run_config.picard_tol


def test_momentum_curl_residual(run_config, run_grid_modes, small_forcing, converged):
    grid, modes = run_grid_modes
    state, _ = converged
    res = momentum_curl_residual(state, small_forcing, run_config, grid, modes)
    assert res["curl_theta_relative"] <= 1e-5
    assert res["theta_component_relative"] <= 1e-5


# ------------------------------------------------------------- set checks

def test_set_check_zero_state(run_config, run_grid_modes):
    grid, modes = run_grid_modes
    member = contraction_set_check(StreamState.zero(grid, modes), run_config,
                                   grid, modes)
    assert member.member
    assert all(m > 0 for m in member.margins)


def test_set_check_constructed_violation(run_config, run_grid_modes, converged):
    grid, modes = run_grid_modes
    state, _ = converged
    v = velocity_from_stream(state, grid, modes)
    vr_norm = weighted_l2(v.vr, grid, modes)
    target = 2.0 * run_config.phi ** (-15.0 / 32.0)
    scaled = state.scaled(target / vr_norm)
    member = contraction_set_check(scaled, run_config, grid, modes)
    assert not member.member
    # second margin is exactly -phi^(-15/32)
    assert member.margins[1] == pytest.approx(-run_config.phi ** (-15.0 / 32.0), rel=1e-9)


def test_set_check_converged_state(run_config, run_grid_modes, converged):
    grid, modes = run_grid_modes
    state, report = converged
    member = contraction_set_check(state, run_config, grid, modes)
    assert member.member
    assert report.set_checks[-1]["member"] is True


# ------------------------------------------------------------- uniqueness

def test_uniqueness_zero_forcing(run_config, run_grid_modes):
    grid, modes = run_grid_modes
    res = uniqueness_probe(ForcingField.zero(grid, modes), run_config,
                           n_seeds=3, seed=0, grid=grid, modes=modes)
    assert res["max_pairwise_distance"] == 0.0
    assert res["n_failed"] == 0


def test_uniqueness_single_seed(run_config, run_grid_modes, small_forcing):
    grid, modes = run_grid_modes
    res = uniqueness_probe(small_forcing, run_config, n_seeds=1, seed=0,
                           grid=grid, modes=modes)
    assert res["max_pairwise_distance"] == 0.0


# ------------------------------------------------------------ calibration

def test_calibrate_positive_and_deterministic(run_config, run_grid_modes):
    grid, modes = run_grid_modes
    c1a, c2a = calibrate_constants(run_config, grid, modes, n_samples=5, seed=4)
    c1b, c2b = calibrate_constants(run_config, grid, modes, n_samples=5, seed=4)
    assert c1a > 0 and c2a > 0
    assert (c1a, c2a) == (c1b, c2b)


def test_iteration_report_serializes(tmp_path, converged):
    from pipeflow.io import read_report, write_report
    _, report = converged
    path = tmp_path / "iter.json"
    write_report(report, path)
    data = read_report(path)
    assert data["status"] == "converged"
    assert len(data["residuals"]) == report.iterations
