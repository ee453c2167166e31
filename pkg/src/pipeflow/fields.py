"""Field containers and physical <-> Fourier space transformations.

Transform convention: for samples g(r_i, z_j) with z_j = -L_z + j dz the
forward transform returns the continuous-transform surrogate

    ghat(r, xi_k) = dz * sum_j g(r, z_j) exp(-i xi_k z_j),   xi_k = pi k / L_z,

stored in FFT order along axis 1.  Parseval then reads
sum_z |g|^2 dz = sum_k |ghat_k|^2 / (2 L_z).  The unpaired Nyquist mode is
not part of the modeled space; solvers never populate it and ForcingField
projects it away on construction.

All containers are immutable after construction (arrays are frozen), so
they may be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import ModeSet, RadialGrid


def forward_transform(field: np.ndarray, modes: ModeSet) -> np.ndarray:
    """Physical samples (n_r, n_z) -> modes ghat(r, xi_k), FFT order."""
    field = np.asarray(field)
    if field.shape[-1] != modes.n_z:
        raise ValueError(f"expected {modes.n_z} axial samples, got {field.shape[-1]}")
    phase = (-1.0) ** modes.k  # accounts for z starting at -L_z
    return np.fft.fft(field, axis=-1) * (modes.delta_z * phase)


def inverse_transform(mode_array: np.ndarray, modes: ModeSet) -> np.ndarray:
    """Inverse of forward_transform; returns the real part."""
    mode_array = np.asarray(mode_array)
    if mode_array.shape[-1] != modes.n_z:
        raise ValueError(f"expected {modes.n_z} modes, got {mode_array.shape[-1]}")
    phase = (-1.0) ** modes.k
    return np.real(np.fft.ifft(mode_array * phase, axis=-1)) / modes.delta_z


def project_nyquist(mode_array: np.ndarray, modes: ModeSet) -> np.ndarray:
    out = mode_array.copy()
    out[..., modes.nyquist_mask] = 0.0
    return out


def dealias_modes(mode_array: np.ndarray, modes: ModeSet) -> np.ndarray:
    """Zero the top third of axial modes (2/3 rule) and the Nyquist mode."""
    out = mode_array.copy()
    out[..., ~modes.dealias_mask()] = 0.0
    return out


@dataclass(frozen=True)
class StreamState:
    """Per-mode stream function psi_hat(r_i, xi_k) and swirl v_theta_hat."""

    psi_modes: np.ndarray
    swirl_modes: np.ndarray

    def __post_init__(self):
        self.psi_modes.flags.writeable = False
        self.swirl_modes.flags.writeable = False

    @classmethod
    def zero(cls, grid: RadialGrid, modes: ModeSet) -> "StreamState":
        shape = (grid.n, modes.n_z)
        return cls(np.zeros(shape, complex), np.zeros(shape, complex))

    def scaled(self, a: float) -> "StreamState":
        return StreamState(a * self.psi_modes, a * self.swirl_modes)

    def __add__(self, other: "StreamState") -> "StreamState":
        return StreamState(self.psi_modes + other.psi_modes,
                           self.swirl_modes + other.swirl_modes)

    def __sub__(self, other: "StreamState") -> "StreamState":
        return StreamState(self.psi_modes - other.psi_modes,
                           self.swirl_modes - other.swirl_modes)

    def reality_defect(self, modes: ModeSet) -> float:
        """Max deviation from ghat(-xi) = conj(ghat(xi)) over both arrays."""
        worst = 0.0
        for arr in (self.psi_modes, self.swirl_modes):
            for k in range(1, modes.n_z // 2):
                a = arr[:, modes.column_of(k)]
                b = arr[:, modes.column_of(-k)]
                worst = max(worst, float(np.max(np.abs(a - np.conj(b)))))
        return worst


@dataclass(frozen=True)
class VelocityField:
    """Physical-space perturbation velocity components on (r_i, z_j)."""

    vr: np.ndarray
    vtheta: np.ndarray
    vz: np.ndarray

    def __post_init__(self):
        self.vr.flags.writeable = False
        self.vtheta.flags.writeable = False
        self.vz.flags.writeable = False

    @property
    def components(self):
        return self.vr, self.vtheta, self.vz


@dataclass(frozen=True)
class ForcingField:
    """Physical-space forcing components; Nyquist content removed.

    Construct through `from_components` so the axial Nyquist projection
    invariant holds (the Nyquist mode is outside the modeled space, and
    leaving forcing content there would show up as a spurious residual).
    """

    fr: np.ndarray
    ftheta: np.ndarray
    fz: np.ndarray

    def __post_init__(self):
        self.fr.flags.writeable = False
        self.ftheta.flags.writeable = False
        self.fz.flags.writeable = False

    @classmethod
    def from_components(cls, fr, ftheta, fz, modes: ModeSet) -> "ForcingField":
        def proj(g):
            return inverse_transform(project_nyquist(forward_transform(g, modes), modes), modes)
        return cls(proj(np.asarray(fr, float)), proj(np.asarray(ftheta, float)),
                   proj(np.asarray(fz, float)))

    @classmethod
    def zero(cls, grid: RadialGrid, modes: ModeSet) -> "ForcingField":
        shape = (grid.n, modes.n_z)
        return cls(np.zeros(shape), np.zeros(shape), np.zeros(shape))

    def scaled(self, a: float) -> "ForcingField":
        return ForcingField(a * self.fr, a * self.ftheta, a * self.fz)

    @property
    def components(self):
        return self.fr, self.ftheta, self.fz


def flux(vz: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """Per-z quadrature of r * v^z over r (cross-section flux / 2 pi)."""
    vz = np.asarray(vz)
    if vz.shape[0] != grid.n:
        raise ValueError(f"expected {grid.n} radial samples, got {vz.shape[0]}")
    return grid.quad_weights @ vz


def velocity_modes_from_stream(state: StreamState, grid: RadialGrid,
                               modes: ModeSet):
    """Mode-space velocity: vr_hat = i xi psi_hat, vz_hat = -(1/r) d_r(r psi_hat)."""
    xi = modes.frequencies[None, :]
    r = grid.nodes
    vr_hat = 1j * xi * state.psi_modes
    vz_hat = -(1.0 / r)[:, None] * (grid.d1 @ (r[:, None] * state.psi_modes))
    vt_hat = state.swirl_modes
    return vr_hat, vt_hat, vz_hat


def velocity_from_stream(state: StreamState, grid: RadialGrid,
                         modes: ModeSet) -> VelocityField:
    """Reconstruct the physical velocity field from a StreamState."""
    vr_hat, vt_hat, vz_hat = velocity_modes_from_stream(state, grid, modes)
    return VelocityField(
        vr=inverse_transform(vr_hat, modes),
        vtheta=inverse_transform(vt_hat, modes),
        vz=inverse_transform(vz_hat, modes),
    )


def azimuthal_vorticity(state: StreamState, grid: RadialGrid,
                        modes: ModeSet, L: np.ndarray | None = None) -> np.ndarray:
    """omega_theta = (L - xi^2) psi per mode, returned in physical space."""
    from .radial import assemble_L
    if L is None:
        L = assemble_L(grid).matrix
    xi2 = modes.frequencies[None, :] ** 2
    om_hat = (L @ state.psi_modes) - xi2 * state.psi_modes
    return inverse_transform(om_hat, modes)


def vorticity_from_velocity(v: VelocityField, grid: RadialGrid,
                            modes: ModeSet) -> np.ndarray:
    """omega_theta = dz v^r - dr v^z computed from the velocity field."""
    vr_hat = forward_transform(v.vr, modes)
    vz_hat = forward_transform(v.vz, modes)
    om_hat = 1j * modes.frequencies[None, :] * vr_hat - grid.d1 @ vz_hat
    return inverse_transform(om_hat, modes)


def divergence(v: VelocityField, grid: RadialGrid, modes: ModeSet) -> np.ndarray:
    """dr v^r + v^r / r + dz v^z in physical space."""
    vr_hat = forward_transform(v.vr, modes)
    vz_hat = forward_transform(v.vz, modes)
    div_hat = (grid.d1 @ vr_hat
               + (1.0 / grid.nodes)[:, None] * vr_hat
               + 1j * modes.frequencies[None, :] * vz_hat)
    return inverse_transform(div_hat, modes)


def nonlinear_forcing(v: VelocityField, grid: RadialGrid, modes: ModeSet,
                      dealias: bool = True,
                      omega_theta: np.ndarray | None = None) -> ForcingField:
    """Quadratic feedback forcing of the fixed-point iteration.

    Radial/axial part:  F*_r = -v^z w + v_th^2 / r,   F*_z = v^r w
    with w the azimuthal vorticity; swirl part:
    F_th = -(v^r d_r + v^z d_z) v_th - (v^r / r) v_th.

    Products are formed pointwise in physical space; with `dealias` the
    top third of axial modes of each product is zeroed.  Axis quotients
    are plain nodal divisions (every node has r > 0; the fields involved
    vanish at the axis, so the quotients stay bounded).
    """
    if omega_theta is None:
        omega_theta = vorticity_from_velocity(v, grid, modes)
    r = grid.nodes[:, None]
    vt_hat = forward_transform(v.vtheta, modes)
    dr_vt = inverse_transform(grid.d1 @ vt_hat, modes)
    dz_vt = inverse_transform(1j * modes.frequencies[None, :] * vt_hat, modes)

    fstar_r = -v.vz * omega_theta + v.vtheta * (v.vtheta / r)
    fstar_z = v.vr * omega_theta
    ftheta = -(v.vr * dr_vt + v.vz * dz_vt) - (v.vr / r) * v.vtheta

    def post(g):
        ghat = forward_transform(g, modes)
        ghat = dealias_modes(ghat, modes) if dealias else project_nyquist(ghat, modes)
        return inverse_transform(ghat, modes)

    return ForcingField(fr=post(fstar_r), ftheta=post(ftheta), fz=post(fstar_z))
