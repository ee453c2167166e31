import numpy as np
import pytest

from pipeflow import assemble_L, assemble_L_squared, axis_rows, wall_rows
from pipeflow.grid import radial_grid
from pipeflow.radial import export_operator_csv


def test_L_annihilates_r_at_moderate_size():
    # exact identity; 1e-10 attainable up to n_r = 32, n^4*eps floor beyond
    for n in (16, 32):
        g = radial_grid(n)
        L = assemble_L(g).matrix
        assert np.max(np.abs(L @ g.nodes)) <= 1e-10


def test_L_identities_at_default_size(grid):
    L = assemble_L(grid).matrix
    r = grid.nodes
    floor = 5e-9  # n_r^4 * eps round-off scale at n_r = 64
    assert np.max(np.abs(L @ r)) <= floor
    assert np.max(np.abs(L @ r**2 - 3.0)) <= floor
    assert np.max(np.abs(L @ r**3 - 8.0 * r)) <= floor


def test_L_squared_on_quintic(grid):
    # L^2 (r^3 - 2 r^4 + r^5) = -90 + 192 r; rows nearest the axis carry
    # entries of order n^8 whose round-off bounds the achievable accuracy
    L2 = assemble_L_squared(grid).matrix
    r = grid.nodes
    err = np.abs(L2 @ (r**3 * (1 - r) ** 2) - (-90.0 + 192.0 * r))
    assert np.max(err[2:]) <= 1e-4
    assert np.max(err) <= 5e-3


def test_axis_rows_on_compatible_function(grid):
    va, vc = axis_rows(grid)
    psi = grid.nodes**3 * (1 - grid.nodes) ** 2
    assert abs(va @ psi) <= 1e-10
    assert abs(vc @ psi) <= 1e-7   # second-derivative row, n^2-scaled round-off


def test_axis_rows_detect_curvature_violation(grid):
    va, vc = axis_rows(grid)
    psi = grid.nodes**2
    assert abs(va @ psi) <= 1e-10          # value at axis is 0
    assert vc @ psi == pytest.approx(2.0, abs=1e-7)  # psi''(0) = 2 detected


def test_axis_rows_on_zero(grid):
    va, vc = axis_rows(grid)
    z = np.zeros(grid.n)
    assert va @ z == 0.0
    assert vc @ z == 0.0


def test_wall_rows(grid):
    wv, ws = wall_rows(grid)
    r = grid.nodes
    psi = r**3 * (1 - r) ** 2
    assert abs(wv @ psi) <= 1e-12
    assert abs(ws @ psi) <= 1e-10
    assert wv @ r == pytest.approx(1.0)
    assert ws @ r == pytest.approx(1.0, abs=1e-9)
    assert wv @ (1 - r) == pytest.approx(0.0, abs=1e-12)
    assert ws @ (1 - r) == pytest.approx(-1.0, abs=1e-9)


def test_operator_kind_tags(grid):
    assert assemble_L(grid).kind == "L"
    assert assemble_L_squared(grid).kind == "L_squared"


def test_export_csv(tmp_path, small_grid):
    op = assemble_L(small_grid)
    path = tmp_path / "L.csv"
    export_operator_csv(op, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "L"
    assert len(lines) == small_grid.n + 1
    first_row = np.array([float(x) for x in lines[1].split(",")])
    np.testing.assert_allclose(first_row, op.matrix[0], rtol=1e-15)
