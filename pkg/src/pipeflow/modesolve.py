"""Per-frequency linear solvers for the stream-function and swirl equations.

For a fixed axial frequency xi the stream equation is

    i xi Ubar(r) (L - xi^2) psi - (L - xi^2)^2 psi = f,
    psi(0) = psi(1) = psi'(1) = L psi(0) = 0,

and the swirl equation is

    i xi Ubar(r) v - (L - xi^2) v = F_theta,     v(0) = v(1) = 0,

with Ubar the Hagen-Poiseuille profile.  Each problem is discretized as a
single bordered dense complex system: collocation rows of the equation in
the interior, constraint rows replacing the rows nearest the boundaries
(two per boundary for the fourth-order problem, one for the second-order
one).  Systems are solved by pivoted LU with two steps of iterative
refinement; at xi = 0 the convection term vanishes and the same code path
solves the degenerate (biharmonic-type) problem.

Energy identities: multiplying the stream equation by r conj(psi) and
integrating gives, for forcing f = i xi Fr,

    xi X + xi^3 Z = -xi Re int_0^1 Fr conj(psi) r dr,
    X = int (Ubar/r) |d_r(r psi)|^2 dr,  Z = int Ubar |psi|^2 r dr,

and for forcing f = -d_r Fz the right side becomes
Im int Fz d_r(r conj(psi)) dr.  The swirl analogue is the full complex
identity  i xi int Ubar |v|^2 r + int |d_r(r v)|^2 / r + xi^2 int |v|^2 r
= int F conj(v) r dr  (right side i xi int G conj(v) r dr when the forcing
is the z-derivative of G).  The *_residual functions below evaluate both
sides by quadrature and return |LHS - RHS|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .grid import RadialGrid
from .radial import assemble_L, axis_rows, wall_rows


class ModeSolveError(RuntimeError):
    """A per-mode linear system could not be solved reliably."""

    def __init__(self, xi, message, condition_estimate=None):
        self.xi = xi
        self.condition_estimate = condition_estimate
        detail = f" (condition estimate {condition_estimate:.2e})" if condition_estimate else ""
        super().__init__(f"mode xi={xi}: {message}{detail}")


@dataclass(frozen=True)
class BaseFlow:
    """Hagen-Poiseuille profile sampled on the grid nodes."""

    profile: np.ndarray
    phi: float

    def __post_init__(self):
        self.profile.flags.writeable = False


def hagen_poiseuille(phi: float, grid: RadialGrid) -> BaseFlow:
    """Ubar(r) = (2 phi / pi) (1 - r^2)."""
    if phi <= 0:
        raise ValueError("phi must be positive")
    return BaseFlow(profile=2.0 * phi / np.pi * (1.0 - grid.nodes**2), phi=float(phi))


def stream_rhs(fr_hat: np.ndarray, fz_hat: np.ndarray, xi: float,
               grid: RadialGrid) -> np.ndarray:
    """f_hat = i xi Fr_hat - d_r Fz_hat."""
    fr_hat = np.asarray(fr_hat)
    fz_hat = np.asarray(fz_hat)
    if fr_hat.shape[0] != grid.n or fz_hat.shape[0] != grid.n:
        raise ValueError("forcing modes must be sampled on the grid nodes")
    return 1j * xi * fr_hat - grid.d1 @ fz_hat


class StreamModeOperator:
    """Bordered system for one stream-function mode, LU-prefactored.

    Constraint rows replace the two rows nearest each boundary: row 0
    (extrapolated psi(0) = 0), row 1 (psi''(0) = 0, equivalent to
    L psi(0) = 0 at the axis), row n-2 (psi'(1) = 0), row n-1 (psi(1) = 0).
    """

    constrained = property(lambda self: self._constrained)

    def __init__(self, xi: float, base: BaseFlow, grid: RadialGrid,
                 L: np.ndarray | None = None):
        if L is None:
            L = assemble_L(grid).matrix
        n = grid.n
        self.xi = float(xi)
        self.grid = grid
        lx = L - xi**2 * np.eye(n)
        a = (1j * xi) * (base.profile[:, None] * lx) - lx @ lx
        a = a.astype(complex)
        axis_val, axis_curv = axis_rows(grid)
        wall_val, wall_slope = wall_rows(grid)
        self._constrained = (0, 1, n - 2, n - 1)
        a[0] = axis_val
        a[1] = axis_curv
        a[n - 2] = wall_slope
        a[n - 1] = wall_val
        self.matrix = a
        try:
            self.lu = lu_factor(a)
        except Exception as exc:  # singular factorization
            raise ModeSolveError(xi, f"LU factorization failed: {exc}") from exc
        if not np.all(np.isfinite(self.lu[0])):
            raise ModeSolveError(xi, "singular bordered system",
                                 self.condition_estimate())
        self._interior = np.ones(n, bool)
        self._interior[list(self._constrained)] = False

    def condition_estimate(self) -> float:
        """1-norm condition estimate of the bordered matrix."""
        from scipy.linalg import lapack
        anorm = np.max(np.abs(self.matrix).sum(axis=1))
        rcond, _ = lapack.zgecon(self.lu[0], anorm)
        return float(anorm) if rcond == 0 else float(1.0 / rcond)

    def rhs_vector(self, f_hat: np.ndarray) -> np.ndarray:
        b = np.asarray(f_hat, dtype=complex).copy()
        b[list(self._constrained)] = 0.0
        return b

    def solve(self, f_hat: np.ndarray, refine: int = 2) -> np.ndarray:
        b = self.rhs_vector(f_hat)
        x = lu_solve(self.lu, b)
        for _ in range(refine):
            x = x + lu_solve(self.lu, b - self.matrix @ x)
        return x

    def solve_adjoint(self, g: np.ndarray, refine: int = 1) -> np.ndarray:
        """Solve A^H y = g (used by operator-norm power iterations)."""
        y = lu_solve(self.lu, g, trans=2)
        for _ in range(refine):
            y = y + lu_solve(self.lu, g - self.matrix.conj().T @ y, trans=2)
        return y

    def interior_residual(self, psi_hat: np.ndarray, f_hat: np.ndarray) -> float:
        """Normwise relative residual of the collocation rows,
        || A psi - b || / (|| b || + ||A|| ||psi||)."""
        b = self.rhs_vector(f_hat)
        res = self.matrix @ psi_hat - b
        anorm = float(np.max(np.abs(self.matrix).sum(axis=1)))
        scale = max(float(np.linalg.norm(b[self._interior]))
                    + anorm * float(np.linalg.norm(psi_hat)), 1e-300)
        return float(np.linalg.norm(res[self._interior])) / scale

    def boundary_defect(self, psi_hat: np.ndarray) -> float:
        return float(np.max(np.abs(self.matrix[list(self._constrained)] @ psi_hat)))


class SwirlModeOperator:
    """Bordered system for one swirl mode (rows 0 and n-1 are constraints)."""

    def __init__(self, xi: float, base: BaseFlow, grid: RadialGrid,
                 L: np.ndarray | None = None):
        if L is None:
            L = assemble_L(grid).matrix
        n = grid.n
        self.xi = float(xi)
        self.grid = grid
        lx = L - xi**2 * np.eye(n)
        a = ((1j * xi) * np.diag(base.profile) - lx).astype(complex)
        a[0] = grid.axis_eval
        wall_val, _ = wall_rows(grid)
        a[n - 1] = wall_val
        self._constrained = (0, n - 1)
        self.matrix = a
        try:
            self.lu = lu_factor(a)
        except Exception as exc:
            raise ModeSolveError(xi, f"LU factorization failed: {exc}") from exc
        if not np.all(np.isfinite(self.lu[0])):
            raise ModeSolveError(xi, "singular bordered system")
        self._interior = np.ones(n, bool)
        self._interior[list(self._constrained)] = False

    constrained = property(lambda self: self._constrained)

    def condition_estimate(self) -> float:
        from scipy.linalg import lapack
        anorm = np.max(np.abs(self.matrix).sum(axis=1))
        rcond, _ = lapack.zgecon(self.lu[0], anorm)
        return float(anorm) if rcond == 0 else float(1.0 / rcond)

    def rhs_vector(self, f_hat: np.ndarray) -> np.ndarray:
        b = np.asarray(f_hat, dtype=complex).copy()
        b[list(self._constrained)] = 0.0
        return b

    def solve(self, f_hat: np.ndarray, refine: int = 2) -> np.ndarray:
        b = self.rhs_vector(f_hat)
        x = lu_solve(self.lu, b)
        for _ in range(refine):
            x = x + lu_solve(self.lu, b - self.matrix @ x)
        return x

    def solve_adjoint(self, g: np.ndarray, refine: int = 1) -> np.ndarray:
        y = lu_solve(self.lu, g, trans=2)
        for _ in range(refine):
            y = y + lu_solve(self.lu, g - self.matrix.conj().T @ y, trans=2)
        return y

    def interior_residual(self, v_hat: np.ndarray, f_hat: np.ndarray) -> float:
        """Normwise relative residual of the collocation rows."""
        b = self.rhs_vector(f_hat)
        res = self.matrix @ v_hat - b
        anorm = float(np.max(np.abs(self.matrix).sum(axis=1)))
        scale = max(float(np.linalg.norm(b[self._interior]))
                    + anorm * float(np.linalg.norm(v_hat)), 1e-300)
        return float(np.linalg.norm(res[self._interior])) / scale


def solve_stream_mode(xi: float, f_hat: np.ndarray, base: BaseFlow,
                      grid: RadialGrid, check: bool = True) -> np.ndarray:
    """Solve one stream-function mode; raises ModeSolveError on failure."""
    op = StreamModeOperator(xi, base, grid)
    try:
        psi = op.solve(np.asarray(f_hat))
    except ModeSolveError:
        raise
    except Exception as exc:
        raise ModeSolveError(xi, str(exc)) from exc
    if check:
        rel = op.interior_residual(psi, f_hat)
        if not np.isfinite(rel) or rel > 1e-8:
            raise ModeSolveError(xi, f"relative residual {rel:.2e} exceeds 1e-8",
                                 op.condition_estimate())
    return psi


def solve_swirl_mode(xi: float, ftheta_hat: np.ndarray, base: BaseFlow,
                     grid: RadialGrid, check: bool = True) -> np.ndarray:
    """Solve one swirl mode; raises ModeSolveError on failure."""
    op = SwirlModeOperator(xi, base, grid)
    try:
        v = op.solve(np.asarray(ftheta_hat))
    except ModeSolveError:
        raise
    except Exception as exc:
        raise ModeSolveError(xi, str(exc)) from exc
    if check:
        rel = op.interior_residual(v, ftheta_hat)
        if not np.isfinite(rel) or rel > 1e-8:
            raise ModeSolveError(xi, f"relative residual {rel:.2e} exceeds 1e-8",
                                 op.condition_estimate())
    return v


# --------------------------------------------------------------------------
# energy identities and a priori functionals (quadrature on solved modes)

def _weighted_over_r(grid: RadialGrid, h: np.ndarray) -> float:
    """int h(r)/r dr for h vanishing at the axis (h/r^2 stays bounded)."""
    return float(grid.quad_weights @ (h / grid.nodes**2))


def energy_identity_residual(psi_hat, fr_hat, xi, base: BaseFlow,
                             grid: RadialGrid) -> float:
    """|LHS - RHS| of the radial-forcing energy identity (forcing i xi Fr)."""
    psi_hat = np.asarray(psi_hat)
    fr_hat = np.asarray(fr_hat)
    r = grid.nodes
    drp = grid.d1 @ (r * psi_hat)
    x_term = _weighted_over_r(grid, base.profile * np.abs(drp) ** 2)
    z_term = float(grid.quad_weights @ (base.profile * np.abs(psi_hat) ** 2))
    lhs = xi * x_term + xi**3 * z_term
    rhs = -xi * float(np.real(grid.quad_weights @ (fr_hat * np.conj(psi_hat))))
    return abs(lhs - rhs)


def axial_forcing_energy_residual(psi_hat, fz_hat, xi, base: BaseFlow,
                                  grid: RadialGrid) -> float:
    """|LHS - RHS| of the identity for forcing f = -d_r Fz.

    The right side is Im int conj(Fz) d_r(r psi) dr; integrating the
    multiplied equation by parts fixes the conjugate on the forcing
    factor (the opposite placement flips the sign and breaks the
    identity, as direct quadrature on solved modes confirms).
    """
    psi_hat = np.asarray(psi_hat)
    fz_hat = np.asarray(fz_hat)
    r = grid.nodes
    drp = grid.d1 @ (r * psi_hat)
    x_term = _weighted_over_r(grid, base.profile * np.abs(drp) ** 2)
    z_term = float(grid.quad_weights @ (base.profile * np.abs(psi_hat) ** 2))
    lhs = xi * x_term + xi**3 * z_term
    rhs = float(np.imag(grid.plain_weights @ (np.conj(fz_hat) * drp)))
    return abs(lhs - rhs)


def swirl_energy_residual(v_hat, ftheta_hat, xi, base: BaseFlow,
                          grid: RadialGrid) -> float:
    """|LHS - RHS| of the swirl energy identity (complex valued identity)."""
    v_hat = np.asarray(v_hat)
    ftheta_hat = np.asarray(ftheta_hat)
    r = grid.nodes
    drv = grid.d1 @ (r * v_hat)
    conv = 1j * xi * complex(grid.quad_weights @ (base.profile * np.abs(v_hat) ** 2))
    diss = _weighted_over_r(grid, np.abs(drv) ** 2)
    zet = xi**2 * float(grid.quad_weights @ np.abs(v_hat) ** 2)
    lhs = conv + diss + zet
    rhs = complex(grid.quad_weights @ (ftheta_hat * np.conj(v_hat)))
    return abs(lhs - rhs)


def swirl_gradient_forcing_energy_residual(v_hat, g_hat, xi, base: BaseFlow,
                                           grid: RadialGrid) -> float:
    """Swirl identity when the forcing is the z-derivative of G (i xi G)."""
    v_hat = np.asarray(v_hat)
    g_hat = np.asarray(g_hat)
    r = grid.nodes
    drv = grid.d1 @ (r * v_hat)
    conv = 1j * xi * complex(grid.quad_weights @ (base.profile * np.abs(v_hat) ** 2))
    diss = _weighted_over_r(grid, np.abs(drv) ** 2)
    zet = xi**2 * float(grid.quad_weights @ np.abs(v_hat) ** 2)
    lhs = conv + diss + zet
    rhs = 1j * xi * complex(grid.quad_weights @ (g_hat * np.conj(v_hat)))
    return abs(lhs - rhs)


def stream_apriori_functional(psi_hat, xi, grid: RadialGrid,
                              L: np.ndarray | None = None) -> float:
    """int |L psi|^2 r + xi^2 int |d_r(r psi)|^2 / r + xi^4 int |psi|^2 r."""
    if L is None:
        L = assemble_L(grid).matrix
    psi_hat = np.asarray(psi_hat)
    r = grid.nodes
    drp = grid.d1 @ (r * psi_hat)
    return (float(grid.quad_weights @ np.abs(L @ psi_hat) ** 2)
            + xi**2 * _weighted_over_r(grid, np.abs(drp) ** 2)
            + xi**4 * float(grid.quad_weights @ np.abs(psi_hat) ** 2))


def swirl_apriori_functional(v_hat, xi, grid: RadialGrid,
                             L: np.ndarray | None = None) -> float:
    """Same quadratic functional evaluated on a swirl mode."""
    return stream_apriori_functional(v_hat, xi, grid, L)


def forcing_mode_norm_sq(fr_hat, fz_hat, grid: RadialGrid) -> float:
    """int (|Fr|^2 + |Fz|^2) r dr for one mode."""
    return float(grid.quad_weights @ (np.abs(np.asarray(fr_hat)) ** 2
                                      + np.abs(np.asarray(fz_hat)) ** 2))
