"""Weighted norms of fields and states.

All field norms integrate over the half-plane (r, z) in (0,1) x [-L_z, L_z)
with the cylindrical volume weight r and WITHOUT the 2*pi azimuthal
factor; every bound checked in this package compares quantities measured
in the same convention, so the factor cancels throughout.

Integer-order Sobolev norms of a vector field include the curvature terms
of the cylindrical gradient: |grad v|^2 picks up (v^r/r)^2 and (v^th/r)^2.
The second-order energy uses the per-component axisymmetric Hessian
surrogate  |d_rr|^2 + 2|d_rz|^2 + |d_zz|^2 + |d_r/r|^2; the omitted
second-order curvature cross terms are bounded by the retained ones for
fields vanishing at the axis, which all fields here do.

Fractional orders are NOT genuine fractional-derivative norms.  They are
the interpolation products used by the estimates this package verifies:

    H^{5/3}  surrogate :  ||v||_{L2}^{1/5}  * ||v||_{H2}^{4/5}
    H^{19/12} surrogate:  ||v||_{L2}^{1/20} * ||v||_{H5/3}^{19/20}

Both are homogeneous, monotone in each factor, and satisfy the
log-convexity chain L2 <= H^{19/12} <= H^{5/3} <= H2 whenever
||v||_{L2} <= ||v||_{H2}.  Reported values labelled "h_5_3"/"h_19_12"
always mean these surrogates.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .fields import StreamState, VelocityField, forward_transform
from .grid import ModeSet, RadialGrid
from .radial import assemble_L

SOBOLEV_ORDERS = (0, 1, 5.0 / 3.0, 19.0 / 12.0, 2)


@dataclass(frozen=True)
class NormReport:
    """Norm values of one velocity field plus the stream-state norm."""

    l2r: float
    h1: float
    h2: float
    h_5_3: float
    h_19_12: float
    hr3: float

    def to_dict(self):
        return asdict(self)


def _mode_energy(g_hat: np.ndarray, grid: RadialGrid, modes: ModeSet,
                 weight: str = "r") -> float:
    """sum_k int |g_hat|^2 (r or 1/r) dr / (2 L_z)  ==  ||g||^2_{L2r(D)}."""
    mag = np.abs(g_hat) ** 2
    if weight == "r":
        per_mode = grid.quad_weights @ mag
    elif weight == "1/r":
        per_mode = grid.quad_weights @ (mag / grid.nodes[:, None] ** 2)
    else:
        raise ValueError(f"unknown weight {weight!r}")
    return float(np.sum(per_mode) / (2.0 * modes.half_period))


def weighted_l2(g, grid: RadialGrid, modes: ModeSet) -> float:
    """L2 norm with the r weight: sqrt( int int |g|^2 r dr dz )."""
    g = np.asarray(g)
    if g.shape != (grid.n, modes.n_z):
        raise ValueError(f"expected shape {(grid.n, modes.n_z)}, got {g.shape}")
    per_z = grid.quad_weights @ (np.abs(g) ** 2)
    return float(np.sqrt(np.sum(per_z) * modes.delta_z))


def weighted_l2_modes(g_hat, grid: RadialGrid, modes: ModeSet) -> float:
    """Same norm evaluated from mode arrays (Parseval)."""
    return float(np.sqrt(_mode_energy(np.asarray(g_hat), grid, modes)))


def _component_energies(v: VelocityField, grid: RadialGrid, modes: ModeSet):
    """L2^2, gradient^2 and Hessian-surrogate^2 energies of the field."""
    r = grid.nodes[:, None]
    xi = modes.frequencies[None, :]
    l2 = 0.0
    grad = 0.0
    hess = 0.0
    for name, comp in (("r", v.vr), ("theta", v.vtheta), ("z", v.vz)):
        ghat = forward_transform(comp, modes)
        dr = grid.d1 @ ghat
        dz = 1j * xi * ghat
        l2 += _mode_energy(ghat, grid, modes)
        grad += _mode_energy(dr, grid, modes) + _mode_energy(dz, grid, modes)
        if name in ("r", "theta"):
            grad += _mode_energy(ghat / r, grid, modes)
        drr = grid.d2 @ ghat
        drz = 1j * xi * dr
        dzz = (1j * xi) ** 2 * ghat
        hess += (_mode_energy(drr, grid, modes)
                 + 2.0 * _mode_energy(drz, grid, modes)
                 + _mode_energy(dzz, grid, modes)
                 + _mode_energy(dr / r, grid, modes))
    return l2, grad, hess


def sobolev_norm(v: VelocityField, s, grid: RadialGrid, modes: ModeSet) -> float:
    """H^s norm for s in {0, 1, 5/3, 19/12, 2} (fractional = surrogates)."""
    l2, grad, hess = _component_energies(v, grid, modes)
    n0 = np.sqrt(l2)
    n1 = np.sqrt(l2 + grad)
    n2 = np.sqrt(l2 + grad + hess)
    if s == 0:
        return float(n0)
    if s == 1:
        return float(n1)
    if s == 2:
        return float(n2)
    n53 = n0 ** 0.2 * n2 ** 0.8
    if abs(s - 5.0 / 3.0) < 1e-12:
        return float(n53)
    if abs(s - 19.0 / 12.0) < 1e-12:
        return float(n0 ** (1.0 / 20.0) * n53 ** (19.0 / 20.0))
    raise ValueError(f"unsupported Sobolev order {s!r}; use one of {SOBOLEV_ORDERS}")


def hr3_norm(state: StreamState, grid: RadialGrid, modes: ModeSet,
             L: np.ndarray | None = None) -> float:
    """Third-order weighted norm of the stream function.

    Square root of the mode sum of
      |d_r(r L psi)|^2 / r + xi^2 |L psi|^2 r + xi^4 |d_r(r psi)|^2 / r
        + xi^6 |psi|^2 r
      + |L psi|^2 r + xi^2 |d_r(r psi)|^2 / r + xi^4 |psi|^2 r
      + |d_r(r psi)|^2 / r + xi^2 |psi|^2 r + |psi|^2 r,
    integrated in r and summed over frequencies.
    """
    if L is None:
        L = assemble_L(grid).matrix
    psi = state.psi_modes
    r = grid.nodes[:, None]
    xi = modes.frequencies[None, :]
    lp = L @ psi
    drp = grid.d1 @ (r * psi)
    drlp = grid.d1 @ (r * lp)

    def e_r(g):          # sum_k int |g|^2 r dr / (2 L)
        return _mode_energy(g, grid, modes, "r")

    def e_ir(g):         # sum_k int |g|^2 / r dr / (2 L)
        return _mode_energy(g, grid, modes, "1/r")

    total = (e_ir(drlp) + e_r(xi * lp) + e_ir(xi**2 * drp) + e_r(xi**3 * psi)
             + e_r(lp) + e_ir(xi * drp) + e_r(xi**2 * psi)
             + e_ir(drp) + e_r(xi * psi) + e_r(psi))
    return float(np.sqrt(total))


def state_l2r(state: StreamState, grid: RadialGrid, modes: ModeSet) -> float:
    """Combined L2r norm of (psi, v_theta) used as the iteration metric."""
    return float(np.sqrt(_mode_energy(state.psi_modes, grid, modes)
                         + _mode_energy(state.swirl_modes, grid, modes)))


def norm_report(v: VelocityField, state: StreamState, grid: RadialGrid,
                modes: ModeSet) -> NormReport:
    return NormReport(
        l2r=sobolev_norm(v, 0, grid, modes),
        h1=sobolev_norm(v, 1, grid, modes),
        h2=sobolev_norm(v, 2, grid, modes),
        h_5_3=sobolev_norm(v, 5.0 / 3.0, grid, modes),
        h_19_12=sobolev_norm(v, 19.0 / 12.0, grid, modes),
        hr3=hr3_norm(state, grid, modes),
    )
