import numpy as np
import pytest

from pipeflow import FlowConfig, VelocityField
from pipeflow.analysis import (canonical_case, check_hlp, check_poincare,
                               check_weighted_interpolation, fit_decay_rate,
                               phi_sweep, stream_apriori_constant,
                               swirl_apriori_constant)
from pipeflow.grid import radial_grid
from pipeflow.sampling import (random_poincare_family, random_smooth_family,
                               rng_from_seed)


# ------------------------------------------------------------- decay fits

def _synthetic_decay_field(grid, modes, rate):
    prof = grid.nodes * (1 - grid.nodes)
    vals = prof[:, None] * np.exp(-rate * modes.z)[None, :]
    z = np.zeros_like(vals)
    return VelocityField(vals, z, z)


def test_fit_recovers_planted_rate(grid, modes):
    v = _synthetic_decay_field(grid, modes, 0.5)
    rep = fit_decay_rate(v, (5.0, 12.0), grid, modes)
    assert rep.alpha_total == pytest.approx(0.5, abs=1e-6)
    assert rep.r_squared_total >= 1.0 - 1e-9
    assert rep.alpha_components["vr"] == pytest.approx(0.5, abs=1e-6)


def test_fit_zero_field_reports_floor(grid, modes):
    z = np.zeros((grid.n, modes.n_z))
    rep = fit_decay_rate(VelocityField(z, z, z), (5.0, 12.0), grid, modes)
    assert rep.below_floor
    assert np.isnan(rep.alpha_total)


def test_fit_window_validation(grid, modes):
    v = _synthetic_decay_field(grid, modes, 0.3)
    with pytest.raises(ValueError, match="support"):
        fit_decay_rate(v, (1.0, 12.0), grid, modes, forcing_support=2.0)
    with pytest.raises(ValueError, match="fewer than 8"):
        fit_decay_rate(v, (5.0, 5.2), grid, modes)


# ---------------------------------------------------------- case handling

def test_unknown_case_tag_lists_supported():
    with pytest.raises(ValueError) as err:
        canonical_case("bogus")
    msg = str(err.value)
    assert "Fr→v:L2" in msg and "Gtheta→vtheta:L2" in msg


def test_ascii_alias():
    assert canonical_case("Fr->v:L2") == "Fr→v:L2"


def test_phi_sweep_validates_phis():
    with pytest.raises(ValueError):
        phi_sweep("Fr→v:L2", [100.0, 50.0, 200.0], 2, FlowConfig())
    with pytest.raises(ValueError):
        phi_sweep("Fr→v:L2", [100.0, 200.0], 2, FlowConfig())


def test_phi_sweep_smoke(small_config):
    # small smoke run; the full-tolerance sweep lives in the acceptance suite
    cfg = FlowConfig(n_r=32, n_z=64, half_period=8.0)
    rep = phi_sweep("Ftheta→dzvtheta:L2", [100.0, 1000.0, 10000.0], 3, cfg, seed=0)
    assert len(rep.worst_ratios) == 3
    assert rep.fitted_slope < 0
    assert rep.normalized_ratios[0] == pytest.approx(
        rep.worst_ratios[0] * 100.0 ** rep.claimed_exponent)
    assert rep.upward_drift <= 3.0


# --------------------------------------------------- a priori constants

def test_apriori_constants_match_reference(grid):
    # spot values from the dense generalized eigensolve of the family form
    c = stream_apriori_constant(0.2, 10.0, grid)
    assert 0.01 < c < 1.0
    w = swirl_apriori_constant(1.0, 100.0, grid)
    assert 0.5 < w < 2.0


# ----------------------------------------------------------- inequalities

def test_poincare_linear_sample(grid):
    # g = r: lhs 1/4, first right side 2, slack 7/4
    rep = check_poincare([grid.nodes.copy()], grid)
    assert rep.violations == 0
    assert rep.worst_slack == pytest.approx(7.0 / 4.0, abs=1e-12)


def test_poincare_zero_sample(grid):
    rep = check_poincare([np.zeros(grid.n)], grid)
    assert rep.violations == 0
    assert rep.worst_slack == 0.0


def test_poincare_random_family(grid):
    fam = random_poincare_family(rng_from_seed(0), grid, 100, wall_zero=True)
    rep = check_poincare(fam, grid)
    assert rep.violations == 0
    assert rep.n_samples == 100


def test_hlp_equality_case(grid):
    # g = r attains the constant 1/2 exactly
    rep = check_hlp([grid.nodes.copy()], grid)
    assert rep.violations == 0
    assert abs(rep.worst_slack) <= 1e-9


def test_hlp_quadratic_sample(grid):
    # g = r^2: slack = 4/15 - 1/5 = 1/15
    rep = check_hlp([grid.nodes**2], grid)
    assert rep.worst_slack == pytest.approx(1.0 / 15.0, abs=1e-12)


def test_hlp_rejects_nonzero_origin(grid):
    with pytest.raises(ValueError, match="g\\(0\\)"):
        check_hlp([np.ones(grid.n)], grid)


def test_hlp_random_family(grid):
    fam = random_poincare_family(rng_from_seed(1), grid, 100)
    rep = check_hlp(fam, grid)
    assert rep.violations == 0


def test_weighted_interpolation_zero_sample_skipped(grid):
    rep = check_weighted_interpolation([np.zeros(grid.n)], grid)
    assert rep.violations == 0
    assert "skipped" in rep.notes
    assert all(np.isnan(c) for c in rep.measured_constants)


def test_weighted_interpolation_simple_sample(grid):
    r = grid.nodes
    rep = check_weighted_interpolation([r * (1 - r)], grid)
    assert all(np.isfinite(c) and c > 0 for c in rep.measured_constants)


def test_weighted_interpolation_stability_under_refinement():
    # same polynomial family on n and 2n: measured constants within 20%
    g1 = radial_grid(32)
    g2 = radial_grid(64)
    rng = rng_from_seed(2)
    coeff_sets = [rng.standard_normal(6) for _ in range(100)]
    fam1 = [np.polyval(c, g1.nodes) for c in coeff_sets]
    fam2 = [np.polyval(c, g2.nodes) for c in coeff_sets]
    r1 = check_weighted_interpolation(fam1, g1)
    r2 = check_weighted_interpolation(fam2, g2)
    for a, b in zip(r1.measured_constants, r2.measured_constants):
        assert abs(a - b) <= 0.2 * min(a, b)
