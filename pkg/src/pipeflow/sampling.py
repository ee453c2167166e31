"""Seeded random samplers for forcings, mode profiles, and stream states.

Radial factors are low-order polynomials respecting the boundary values
the sampled object must satisfy (radial/azimuthal vector components carry
an extra factor r so the Cartesian field stays regular on the axis).
Axial factors are compactly supported smooth profiles: either the C-inf
bump exp(1 - 1/(1 - (z/w)^2)) or a Gaussian truncated at the support edge
(the Gaussian's spectral tail is far below the bump's, which matters for
far-field experiments where the solution dives many decades).
"""

from __future__ import annotations

import numpy as np

from .fields import ForcingField
from .grid import ModeSet, RadialGrid
from .norms import weighted_l2


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def bump_profile(z: np.ndarray, center: float = 0.0, width: float = 1.5) -> np.ndarray:
    """C-infinity bump supported on |z - center| < width, peak value 1."""
    t = (np.asarray(z) - center) / width
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    return out


def gaussian_profile(z: np.ndarray, sigma: float = 0.5,
                     support: float = 2.0) -> np.ndarray:
    """exp(-(z/sigma)^2) cut to |z| <= support (edge value ~ e^-16 by default)."""
    z = np.asarray(z)
    out = np.exp(-(z / sigma) ** 2)
    out[np.abs(z) > support] = 0.0
    return out


def radial_polynomial(rng: np.random.Generator, r: np.ndarray, degree: int = 4,
                      axis_zero: bool = False, complex_coeffs: bool = False) -> np.ndarray:
    """Random polynomial samples; axis_zero multiplies by r."""
    c = rng.standard_normal(degree + 1)
    if complex_coeffs:
        c = c + 1j * rng.standard_normal(degree + 1)
    vals = np.polyval(c, r)
    return r * vals if axis_zero else vals


def random_mode_profile(rng: np.random.Generator, grid: RadialGrid,
                        degree: int = 4, axis_zero: bool = True) -> np.ndarray:
    """Complex radial profile for per-mode experiments."""
    return radial_polynomial(rng, grid.nodes, degree, axis_zero, complex_coeffs=True)


def random_forcing(rng: np.random.Generator, grid: RadialGrid, modes: ModeSet,
                   support: float = 2.0, z_profile: str = "bump",
                   degree: int = 3) -> ForcingField:
    """Random smooth forcing, compactly supported in |z| <= support.

    Each component is polynomial(r) times its own random axial profile;
    F^r and F^theta vanish on the axis as regularity requires.
    """
    z = modes.z

    def zfac():
        if z_profile == "gauss":
            return gaussian_profile(z, sigma=0.25 * support, support=support)
        center = rng.uniform(-0.25 * support, 0.25 * support)
        width = rng.uniform(0.4 * support, 0.75 * support - abs(center) * 0.9)
        width = min(width, support - abs(center))
        return bump_profile(z, center, width)

    fr = radial_polynomial(rng, grid.nodes, degree, axis_zero=True)[:, None] * zfac()[None, :]
    ft = radial_polynomial(rng, grid.nodes, degree, axis_zero=True)[:, None] * zfac()[None, :]
    fz = radial_polynomial(rng, grid.nodes, degree, axis_zero=False)[:, None] * zfac()[None, :]
    return ForcingField.from_components(fr, ft, fz, modes)


def normalized_forcing(rng: np.random.Generator, grid: RadialGrid, modes: ModeSet,
                       target_norm: float, support: float = 2.0,
                       z_profile: str = "bump") -> ForcingField:
    """Random forcing rescaled so its combined weighted L2 norm hits target."""
    f = random_forcing(rng, grid, modes, support=support, z_profile=z_profile)
    total = np.sqrt(weighted_l2(f.fr, grid, modes) ** 2
                    + weighted_l2(f.ftheta, grid, modes) ** 2
                    + weighted_l2(f.fz, grid, modes) ** 2)
    if total == 0.0:
        raise ValueError("sampled forcing is identically zero")
    return f.scaled(target_norm / total)


# compatibility basis for random stream states: psi components r^m (1-r^2)^2
# satisfy psi(0) = 0, psi''(0) = 0 (no r^2 term for m != 2), psi(1) = psi'(1) = 0
_STREAM_POWERS = (1, 3, 4, 5)
_SWIRL_POWERS = (1, 2, 3, 4)


def random_stream_state(rng: np.random.Generator, grid: RadialGrid,
                        modes: ModeSet, n_zmodes: int = 6):
    """Random StreamState satisfying the boundary and axis conditions.

    Axial structure is a random band of low frequencies with conjugate
    symmetry (so the physical field is real); the Nyquist mode stays zero.
    """
    from .fields import StreamState
    r = grid.nodes
    shape = (grid.n, modes.n_z)
    psi = np.zeros(shape, complex)
    swirl = np.zeros(shape, complex)
    kmax = min(n_zmodes, modes.n_z // 2 - 1)
    for k in range(0, kmax + 1):
        cpsi = sum(rng.standard_normal() * r**m * (1.0 - r**2) ** 2
                   for m in _STREAM_POWERS)
        cswl = sum(rng.standard_normal() * r**m * (1.0 - r)
                   for m in _SWIRL_POWERS)
        amp = rng.standard_normal() + (1j * rng.standard_normal() if k > 0 else 0.0)
        col = modes.column_of(k)
        psi[:, col] = amp * cpsi
        swirl[:, col] = amp * cswl
        if k > 0:
            psi[:, modes.column_of(-k)] = np.conj(psi[:, col])
            swirl[:, modes.column_of(-k)] = np.conj(swirl[:, col])
    return StreamState(psi, swirl)


def random_poincare_family(rng: np.random.Generator, grid: RadialGrid,
                           n_samples: int, degree: int = 5,
                           wall_zero: bool = False) -> list[np.ndarray]:
    """Polynomials with g(0) = 0 (and g(1) = 0 when wall_zero)."""
    r = grid.nodes
    out = []
    for _ in range(n_samples):
        g = radial_polynomial(rng, r, degree, axis_zero=True)
        if wall_zero:
            g = g * (1.0 - r)
        out.append(g)
    return out


def random_smooth_family(rng: np.random.Generator, grid: RadialGrid,
                         n_samples: int, degree: int = 5) -> list[np.ndarray]:
    """Unconstrained polynomial samples (C^2 family for inequality scans)."""
    return [radial_polynomial(rng, grid.nodes, degree) for _ in range(n_samples)]
