import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pipeflow import forward_transform, inverse_transform
from pipeflow.fields import dealias_modes, project_nyquist


def test_zero_round_trip(small_grid, small_modes):
    g = np.zeros((small_grid.n, small_modes.n_z))
    G = forward_transform(g, small_modes)
    assert np.all(G == 0)
    assert np.all(inverse_transform(G, small_modes) == 0)


def test_single_harmonic_hits_two_modes(grid, modes):
    g = np.cos(np.pi * modes.z / modes.half_period)[None, :] * np.ones((grid.n, 1))
    G = forward_transform(g, modes)
    amps = np.max(np.abs(G), axis=0)
    live = np.where(amps > 1e-9 * amps.max())[0]
    assert sorted(modes.k[live].tolist()) == [-1, 1]
    xi_live = modes.frequencies[live]
    np.testing.assert_allclose(np.abs(xi_live), np.pi / modes.half_period)


def test_round_trip_random_field(grid, modes, rng):
    g = rng.standard_normal((grid.n, modes.n_z))
    back = inverse_transform(forward_transform(g, modes), modes)
    assert np.max(np.abs(back - g)) <= 1e-12


def test_parseval(grid, modes, rng):
    g = rng.standard_normal((grid.n, modes.n_z))
    G = forward_transform(g, modes)
    lhs = np.sum(np.abs(g) ** 2, axis=1) * modes.delta_z
    rhs = np.sum(np.abs(G) ** 2, axis=1) / (2.0 * modes.half_period)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, lhs.max())


def test_reality_symmetry_of_transform(grid, modes, rng):
    G = forward_transform(rng.standard_normal((grid.n, modes.n_z)), modes)
    for k in (1, 7, 50):
        a = G[:, modes.column_of(k)]
        b = G[:, modes.column_of(-k)]
        assert np.max(np.abs(a - np.conj(b))) <= 1e-9 * max(1.0, np.max(np.abs(a)))


def test_nyquist_projection(small_grid, small_modes, rng):
    G = forward_transform(rng.standard_normal((small_grid.n, small_modes.n_z)),
                          small_modes)
    P = project_nyquist(G, small_modes)
    assert np.all(P[:, small_modes.nyquist_mask] == 0)
    keep = ~small_modes.nyquist_mask
    np.testing.assert_array_equal(P[:, keep], G[:, keep])


def test_dealias_zeroes_top_third(small_modes, small_grid, rng):
    G = forward_transform(rng.standard_normal((small_grid.n, small_modes.n_z)),
                          small_modes)
    D = dealias_modes(G, small_modes)
    assert np.all(D[:, np.abs(small_modes.k) >= small_modes.n_z / 3.0] == 0)


def test_shape_mismatch_raises(small_grid, small_modes):
    with pytest.raises(ValueError):
        forward_transform(np.zeros((small_grid.n, small_modes.n_z + 2)), small_modes)
    with pytest.raises(ValueError):
        inverse_transform(np.zeros((small_grid.n, 7), complex), small_modes)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_round_trip_property(small_grid, small_modes, seed):
    g = np.random.default_rng(seed).standard_normal((small_grid.n, small_modes.n_z))
    back = inverse_transform(forward_transform(g, small_modes), small_modes)
    assert np.max(np.abs(back - g)) <= 1e-12 * max(1.0, np.max(np.abs(g)))
