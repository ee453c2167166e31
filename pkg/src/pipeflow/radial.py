"""The radial operator  L = d^2/dr^2 + (1/r) d/dr - 1/r^2  and its
boundary/axis constraint rows.

L annihilates r, maps r^2 to 3 and r^3 to 8r; these identities (exact for
the discrete operator up to round-off of order n_r^4 * eps) are the
assembly invariants.  The diagonal of the assembled matrix is adjusted so
that L applied to the samples of r vanishes as exactly as the summation
allows, the same device as the negative-sum trick used for d1 and d2.

Axis conditions for a stream function psi: psi(0) = 0 and L psi(0) = 0.
For smooth psi = a1 r + a2 r^2 + ..., L psi -> 3 a2 as r -> 0 while
psi''(0) = 2 a2, so given psi(0) = 0 the condition L psi(0) = 0 is
equivalent to psi''(0) = 0; the constraint row is assembled in that form
(second-derivative matrix composed with extrapolation to r = 0), which
avoids evaluating 1/r weights at the axis.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .grid import RadialGrid


@dataclass(frozen=True)
class RadialOperator:
    """A dense radial operator with a tag describing what it is."""

    matrix: np.ndarray
    kind: str  # "L", "L_squared", "d1", "identity-weighted"

    def __post_init__(self):
        self.matrix.flags.writeable = False

    def apply(self, g):
        return self.matrix @ g


def assemble_L(grid: RadialGrid) -> RadialOperator:
    """Assemble L = d2 + (1/r) d1 - 1/r^2 on the grid nodes."""
    r = grid.nodes
    mat = grid.d2 + (1.0 / r)[:, None] * grid.d1 - np.diag(1.0 / r**2)
    # absorb accumulated row round-off into the diagonal so that the
    # analytic null function r is annihilated as exactly as possible
    off = mat - np.diag(np.diag(mat))
    np.fill_diagonal(mat, -(off @ r) / r)
    return RadialOperator(matrix=mat, kind="L")


def assemble_L_squared(grid: RadialGrid) -> RadialOperator:
    L = assemble_L(grid).matrix
    return RadialOperator(matrix=L @ L, kind="L_squared")


def axis_rows(grid: RadialGrid) -> tuple[np.ndarray, np.ndarray]:
    """Constraint rows enforcing psi(0) = 0 and L psi(0) = 0.

    Returns (value_row, curvature_row): linear functionals on nodal values
    giving the extrapolated psi(0) and psi''(0).
    """
    value_row = grid.axis_eval.copy()
    curvature_row = grid.axis_eval @ grid.d2
    return value_row, curvature_row


def wall_rows(grid: RadialGrid) -> tuple[np.ndarray, np.ndarray]:
    """Constraint rows evaluating psi(1) and psi'(1) (r = 1 is a node)."""
    n = grid.n
    value_row = np.zeros(n)
    value_row[n - 1] = 1.0
    slope_row = grid.d1[n - 1].copy()
    return value_row, slope_row


def export_operator_csv(op: RadialOperator, path) -> None:
    """Write the operator matrix as CSV (debugging aid, flag-gated in the CLI)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([op.kind])
        for row in op.matrix:
            writer.writerow([format(x, ".17g") for x in row])
