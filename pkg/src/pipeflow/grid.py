"""Radial collocation grid and axial Fourier mode set.

Radial discretization: the n_r nodes are the Gauss-Lobatto family
r_j = cos^2(pi*j/(2*n_r)), j = 0..n_r-1, mapped to (0, 1] -- the full
Lobatto set on [0, 1] with the r = 0 endpoint removed.  All nodes are
strictly positive, so operators carrying 1/r or 1/r^2 weights are finite
row by row; conditions at the axis are imposed through a barycentric
extrapolation row evaluated at r = 0.

Differentiation matrices are barycentric-polynomial (exact for the
degree n_r-1 interpolant); pairwise node differences are formed with the
trigonometric identity r_i - r_j = -sin((t_i+t_j)/2) sin((t_i-t_j)/2) to
avoid cancellation.

Quadrature: `quad_weights` integrate g(r) r dr over (0, 1) exactly for
polynomials g up to degree n_r - 1 (Clenshaw-Curtis weights of the full
Lobatto set times r; the removed r = 0 node carries zero weight because
of the r factor).  `plain_weights` integrate g(r) dr at the same degree;
they fold the r = 0 Clenshaw-Curtis weight through the extrapolation row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RadialGrid:
    """Nodes, differentiation operators, and quadrature on r in (0, 1]."""

    nodes: np.ndarray         # strictly increasing, in (0, 1]
    d1: np.ndarray            # first-derivative matrix
    d2: np.ndarray            # second-derivative matrix
    quad_weights: np.ndarray  # sum w_i g(r_i) ~ int_0^1 g r dr
    plain_weights: np.ndarray  # sum w_i g(r_i) ~ int_0^1 g dr
    axis_eval: np.ndarray     # row functional: value of the interpolant at r=0

    def __post_init__(self):
        for arr in (self.nodes, self.d1, self.d2, self.quad_weights,
                    self.plain_weights, self.axis_eval):
            arr.flags.writeable = False

    @property
    def n(self) -> int:
        return self.nodes.size

    def integrate_r(self, g) -> float | np.ndarray:
        """Integral of g(r) r dr; g may be (n,) or (n, m)."""
        return self.quad_weights @ g

    def integrate_plain(self, g) -> float | np.ndarray:
        """Integral of g(r) dr (uses the extrapolated r=0 node)."""
        return self.plain_weights @ g


def _clenshaw_curtis_unit(n: int) -> np.ndarray:
    """Clenshaw-Curtis weights for the n+1 Lobatto nodes on [0, 1]."""
    theta = np.pi * np.arange(n + 1) / n
    w = np.zeros(n + 1)
    v = np.ones(n - 1)
    for k in range(1, n // 2 + 1):
        fac = 1.0 if 2 * k == n else 2.0
        v -= fac * np.cos(2.0 * k * theta[1:-1]) / (4.0 * k * k - 1.0)
    w[1:-1] = 2.0 * v / n
    w[0] = w[-1] = 1.0 / (n * n - 1.0 + (n % 2))
    return 0.5 * w  # [-1, 1] -> [0, 1]


def radial_grid(n_r: int) -> RadialGrid:
    """Build the radial grid with n_r nodes in (0, 1]."""
    if n_r < 8:
        raise ValueError("n_r must be at least 8")
    n = n_r
    j = np.arange(n + 1)
    theta = np.pi * j / n
    r_full = np.cos(theta / 2.0) ** 2      # descending: 1 ... 0
    # barycentric weights of the full Lobatto set, restricted to the kept
    # nodes; dropping the r=0 endpoint multiplies each weight by (r_j - 0)
    lam_full = np.where((j == 0) | (j == n), 0.5, 1.0) * (-1.0) ** j
    r = r_full[:n]
    lam = lam_full[:n] * r
    t = theta[:n]

    dx = -np.sin((t[:, None] + t[None, :]) / 2.0) * np.sin((t[:, None] - t[None, :]) / 2.0)
    np.fill_diagonal(dx, 1.0)
    z = 1.0 / dx
    np.fill_diagonal(z, 0.0)
    ratio = lam[None, :] / lam[:, None]    # lam_j / lam_i

    d1 = ratio * z
    np.fill_diagonal(d1, 0.0)
    np.fill_diagonal(d1, -d1.sum(axis=1))  # exact on constants
    d2 = 2.0 * z * (ratio * np.diag(d1)[:, None] - d1)
    np.fill_diagonal(d2, 0.0)
    np.fill_diagonal(d2, -d2.sum(axis=1))

    wcc = _clenshaw_curtis_unit(n)
    quad = wcc[:n] * r                     # r dr measure; r=0 term vanishes
    axis_w = lam / (0.0 - r)
    axis_eval = axis_w / axis_w.sum()
    plain = wcc[:n] + wcc[n] * axis_eval   # dr measure via extrapolated node

    # store ascending
    rev = slice(None, None, -1)
    return RadialGrid(
        nodes=r[rev].copy(),
        d1=d1[rev, rev].copy(),
        d2=d2[rev, rev].copy(),
        quad_weights=quad[rev].copy(),
        plain_weights=plain[rev].copy(),
        axis_eval=axis_eval[rev].copy(),
    )


@dataclass(frozen=True)
class ModeSet:
    """Truncated axial frequencies xi_k = pi*k/L_z on the periodic surrogate.

    `frequencies` and `k` are in FFT order (0, 1, ..., n_z/2-1, -n_z/2,
    ..., -1).  The unpaired Nyquist mode k = -n_z/2 has no conjugate
    partner and is forced to zero amplitude throughout the code; see
    `nyquist_mask`.
    """

    frequencies: np.ndarray
    k: np.ndarray
    half_period: float

    def __post_init__(self):
        self.frequencies.flags.writeable = False
        self.k.flags.writeable = False

    @property
    def n_z(self) -> int:
        return self.k.size

    @property
    def delta_z(self) -> float:
        return 2.0 * self.half_period / self.n_z

    @property
    def z(self) -> np.ndarray:
        return -self.half_period + self.delta_z * np.arange(self.n_z)

    @property
    def nyquist_mask(self) -> np.ndarray:
        return self.k == -(self.n_z // 2)

    @property
    def solve_k(self) -> np.ndarray:
        """Integer k of the modes actually solved (k >= 0, Nyquist excluded);
        negative modes follow from conjugate symmetry."""
        return np.arange(0, self.n_z // 2)

    def column_of(self, k: int) -> int:
        return int(np.where(self.k == k)[0][0])

    def dealias_mask(self) -> np.ndarray:
        """Modes kept by the 2/3 rule: |k| < n_z/3 (and never Nyquist)."""
        return (np.abs(self.k) < self.n_z / 3.0) & ~self.nyquist_mask


def mode_set(n_z: int, half_period: float) -> ModeSet:
    if n_z < 8 or n_z % 2 != 0:
        raise ValueError("n_z must be even and at least 8")
    if half_period <= 0:
        raise ValueError("half_period must be positive")
    k = np.rint(np.fft.fftfreq(n_z) * n_z).astype(int)
    return ModeSet(frequencies=np.pi * k / half_period, k=k,
                   half_period=float(half_period))


def grids_from_config(config) -> tuple[RadialGrid, ModeSet]:
    return radial_grid(config.n_r), mode_set(config.n_z, config.half_period)
