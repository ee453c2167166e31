"""Fixed-point iteration for the steady nonlinear problem.

The linear solution operator T maps a forcing (F^r, F^z, F^theta) to the
pair (psi, v_theta) solving the stream-function and swirl problems for
every axial frequency.  The nonlinear solve iterates

    state_0   = T F
    state_n+1 = state_n + relaxation * (state_0 + T N(state_n) - state_n)

where N is the quadratic feedback forcing of `fields.nonlinear_forcing`;
at relaxation = 1 this is exactly  state_n+1 = state_0 + T N(state_n).
The residual is the combined weighted-L2 distance of successive states.

Mode systems depend only on (phi, grid, modes), so their LU factors are
prefactored once per run in a ModeOperatorSet and reused across
iterations.  Only modes k >= 0 are solved; negative frequencies follow by
conjugate symmetry, which keeps the reality invariant exact.  The set of
per-mode solves is an embarrassingly parallel map; set PIPEFLOW_THREADS
to solve modes in a thread pool (results are written to disjoint columns,
so the output is independent of scheduling order).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .config import FlowConfig
from .fields import (ForcingField, StreamState, VelocityField, dealias_modes,
                     forward_transform, inverse_transform, nonlinear_forcing,
                     project_nyquist, velocity_from_stream,
                     vorticity_from_velocity)
from .grid import ModeSet, RadialGrid, grids_from_config
from .modesolve import (BaseFlow, ModeSolveError, StreamModeOperator,
                        SwirlModeOperator, hagen_poiseuille)
from .norms import sobolev_norm, state_l2r, weighted_l2
from .radial import assemble_L
from .sampling import random_forcing, rng_from_seed

DIVERGENCE_FACTOR = 1e6


def thread_count() -> int:
    raw = os.environ.get("PIPEFLOW_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


class ModeOperatorSet:
    """Prefactored stream and swirl operators for all solved modes."""

    def __init__(self, base: BaseFlow, grid: RadialGrid, modes: ModeSet):
        self.base = base
        self.grid = grid
        self.modes = modes
        self.L = assemble_L(grid).matrix
        self.stream = {}
        self.swirl = {}
        for k in modes.solve_k:
            xi = np.pi * k / modes.half_period
            self.stream[int(k)] = StreamModeOperator(xi, base, grid, self.L)
            self.swirl[int(k)] = SwirlModeOperator(xi, base, grid, self.L)

    def _solve_all(self, ops: dict, rhs_modes: np.ndarray,
                   diagnostics: list | None = None, label: str = "") -> np.ndarray:
        out = np.zeros_like(rhs_modes, dtype=complex)
        modes = self.modes
        rows = {}

        def solve_one(k):
            col = modes.column_of(k)
            try:
                x = ops[k].solve(rhs_modes[:, col])
            except ModeSolveError:
                raise
            except Exception as exc:
                raise ModeSolveError(np.pi * k / modes.half_period, str(exc)) from exc
            out[:, col] = x
            if k > 0:
                out[:, modes.column_of(-k)] = np.conj(x)
            if diagnostics is not None:
                rows[k] = (label, ops[k].xi,
                           ops[k].interior_residual(x, rhs_modes[:, col]),
                           ops[k].condition_estimate())

        workers = thread_count()
        ks = list(ops.keys())
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(solve_one, ks))
        else:
            for k in ks:
                solve_one(k)
        if diagnostics is not None:
            diagnostics.extend(rows[k] for k in sorted(rows))
        return out

    def solve_stream(self, f_modes: np.ndarray,
                     diagnostics: list | None = None) -> np.ndarray:
        return self._solve_all(self.stream, f_modes, diagnostics, "stream")

    def solve_swirl(self, f_modes: np.ndarray,
                    diagnostics: list | None = None) -> np.ndarray:
        return self._solve_all(self.swirl, f_modes, diagnostics, "swirl")

    def diagnostics(self):
        """Per-mode (xi, condition estimate) rows for verbose logging."""
        rows = []
        for k in sorted(self.stream):
            xi = np.pi * k / self.modes.half_period
            rows.append(("stream", xi, self.stream[k].condition_estimate()))
            rows.append(("swirl", xi, self.swirl[k].condition_estimate()))
        return rows


def linear_solve_T(F: ForcingField, base: BaseFlow, grid: RadialGrid,
                   modes: ModeSet, ops: ModeOperatorSet | None = None,
                   diagnostics: list | None = None) -> StreamState:
    """One application of the linear solution operator T.

    Pass a list as `diagnostics` to collect per-mode rows of
    (equation, xi, interior residual, condition estimate).
    """
    if ops is None:
        ops = ModeOperatorSet(base, grid, modes)
    fr_hat = project_nyquist(forward_transform(F.fr, modes), modes)
    fz_hat = project_nyquist(forward_transform(F.fz, modes), modes)
    ft_hat = project_nyquist(forward_transform(F.ftheta, modes), modes)
    f_hat = 1j * modes.frequencies[None, :] * fr_hat - grid.d1 @ fz_hat
    psi = ops.solve_stream(f_hat, diagnostics)
    swirl = ops.solve_swirl(ft_hat, diagnostics)
    return StreamState(psi, swirl)


@dataclass(frozen=True)
class SetMembership:
    """Margins (bound - value) of the four bounded-set inequalities."""

    vstar_h19_12: float
    vstar_bound: float
    vr_l2: float
    vr_bound: float
    swirl_h19_12: float
    swirl_bound: float
    dz_swirl_l2: float
    dz_swirl_bound: float

    @property
    def margins(self):
        return (self.vstar_bound - self.vstar_h19_12,
                self.vr_bound - self.vr_l2,
                self.swirl_bound - self.swirl_h19_12,
                self.dz_swirl_bound - self.dz_swirl_l2)

    @property
    def member(self) -> bool:
        return all(m >= 0.0 for m in self.margins)

    def to_dict(self):
        d = asdict(self)
        d["margins"] = list(self.margins)
        d["member"] = self.member
        return d


def contraction_set_check(state: StreamState, config: FlowConfig,
                          grid: RadialGrid, modes: ModeSet) -> SetMembership:
    """Evaluate the four iterate bounds that define the contraction set.

    The bounds scale as phi^(1/96) (velocity norms, with the calibrated
    constants) and phi^(-15/32), phi^(-5/16) (the radial-velocity and
    swirl-derivative smallness conditions).
    """
    phi = config.phi
    v = velocity_from_stream(state, grid, modes)
    zero = np.zeros_like(v.vtheta)
    vstar = VelocityField(vr=v.vr, vtheta=zero, vz=v.vz)
    vtheta_only = VelocityField(vr=zero, vtheta=v.vtheta, vz=zero)
    dz_swirl = inverse_transform(
        1j * modes.frequencies[None, :] * state.swirl_modes, modes)
    return SetMembership(
        vstar_h19_12=sobolev_norm(vstar, 19.0 / 12.0, grid, modes),
        vstar_bound=2.0 * config.c1_cal * phi ** (1.0 / 96.0),
        vr_l2=weighted_l2(v.vr, grid, modes),
        vr_bound=phi ** (-15.0 / 32.0),
        swirl_h19_12=sobolev_norm(vtheta_only, 19.0 / 12.0, grid, modes),
        swirl_bound=2.0 * config.c2_cal * phi ** (1.0 / 96.0),
        dz_swirl_l2=weighted_l2(dz_swirl, grid, modes),
        dz_swirl_bound=phi ** (-5.0 / 16.0),
    )


@dataclass
class IterationReport:
    """History of one fixed-point run."""

    status: str = "max-iter"          # converged | max-iter | diverged
    residuals: list = field(default_factory=list)
    set_checks: list = field(default_factory=list)   # SetMembership dicts
    iterations: int = 0
    phi: float = 0.0
    relaxation: float = 1.0
    picard_tol: float = 0.0
    seed: int | None = None

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def to_dict(self):
        return {
            "status": self.status,
            "residuals": list(self.residuals),
            "set_checks": list(self.set_checks),
            "iterations": self.iterations,
            "phi": self.phi,
            "relaxation": self.relaxation,
            "picard_tol": self.picard_tol,
            "seed": self.seed,
        }


def picard_solve(F: ForcingField, config: FlowConfig,
                 grid: RadialGrid | None = None, modes: ModeSet | None = None,
                 ops: ModeOperatorSet | None = None,
                 initial: StreamState | None = None,
                 seed: int | None = None) -> tuple[StreamState, IterationReport]:
    """Iterate to a solution of the full nonlinear problem.

    Returns the final state together with the iteration report; statuses
    are "converged", "max-iter" and "diverged" (residual exceeding 1e6
    times its initial value, reported instead of raising).
    """
    if grid is None or modes is None:
        grid, modes = grids_from_config(config)
    base = hagen_poiseuille(config.phi, grid)
    if ops is None:
        ops = ModeOperatorSet(base, grid, modes)
    report = IterationReport(phi=config.phi, relaxation=config.relaxation,
                             picard_tol=config.picard_tol, seed=seed)
    state0 = linear_solve_T(F, base, grid, modes, ops)
    state = state0 if initial is None else initial
    first_residual = None
    for it in range(config.picard_max_iter):
        v = velocity_from_stream(state, grid, modes)
        feedback = nonlinear_forcing(v, grid, modes, dealias=config.dealias)
        proposal = state0 + linear_solve_T(feedback, base, grid, modes, ops)
        new_state = state + (proposal - state).scaled(config.relaxation)
        residual = state_l2r(new_state - state, grid, modes)
        report.residuals.append(residual)
        report.set_checks.append(
            contraction_set_check(new_state, config, grid, modes).to_dict())
        state = new_state
        report.iterations = it + 1
        if first_residual is None:
            first_residual = residual if residual > 0 else None
        if not np.isfinite(residual) or (
                first_residual is not None
                and residual > DIVERGENCE_FACTOR * first_residual):
            report.status = "diverged"
            return state, report
        if residual <= config.picard_tol:
            report.status = "converged"
            return state, report
    report.status = "max-iter"
    return state, report


def fixed_point_defect(state: StreamState, F: ForcingField, config: FlowConfig,
                       grid: RadialGrid, modes: ModeSet,
                       ops: ModeOperatorSet | None = None) -> float:
    """|| state - T F - T N(state) ||_{L2r}; small for converged states."""
    base = hagen_poiseuille(config.phi, grid)
    if ops is None:
        ops = ModeOperatorSet(base, grid, modes)
    state0 = linear_solve_T(F, base, grid, modes, ops)
    v = velocity_from_stream(state, grid, modes)
    feedback = nonlinear_forcing(v, grid, modes, dealias=config.dealias)
    image = state0 + linear_solve_T(feedback, base, grid, modes, ops)
    return state_l2r(state - image, grid, modes)


def uniqueness_probe(F: ForcingField, config: FlowConfig, n_seeds: int,
                     seed: int = 0, perturbation: float = 1e-3,
                     grid: RadialGrid | None = None,
                     modes: ModeSet | None = None) -> dict:
    """Max pairwise distance between converged states from perturbed starts.

    Each run starts from T F plus a small random admissible perturbation;
    the distance is measured in the H^{19/12} surrogate of the velocity
    fields.  Non-converged seeds are excluded and counted.
    """
    from .sampling import random_stream_state
    if grid is None or modes is None:
        grid, modes = grids_from_config(config)
    base = hagen_poiseuille(config.phi, grid)
    ops = ModeOperatorSet(base, grid, modes)
    rng = rng_from_seed(seed)
    state0 = linear_solve_T(F, base, grid, modes, ops)
    converged = []
    failures = 0
    for i in range(n_seeds):
        if i == 0:
            start = state0
        else:
            noise = random_stream_state(rng, grid, modes)
            scale = perturbation * state_l2r(state0, grid, modes) \
                / max(state_l2r(noise, grid, modes), 1e-300)
            start = state0 + noise.scaled(scale)
        state, report = picard_solve(F, config, grid, modes, ops, initial=start,
                                     seed=seed)
        if report.converged:
            converged.append(state)
        else:
            failures += 1
    max_distance = 0.0
    for i in range(len(converged)):
        for j in range(i + 1, len(converged)):
            diff = converged[i] - converged[j]
            dv = velocity_from_stream(diff, grid, modes)
            max_distance = max(max_distance,
                               sobolev_norm(dv, 19.0 / 12.0, grid, modes))
    return {
        "n_seeds": n_seeds,
        "n_converged": len(converged),
        "n_failed": failures,
        "max_pairwise_distance": max_distance,
        "seed": seed,
    }


def calibrate_constants(config: FlowConfig, grid: RadialGrid | None = None,
                        modes: ModeSet | None = None, n_samples: int = 50,
                        seed: int = 0) -> tuple[float, float]:
    """Estimate the solution-operator gains c1 (stream) and c2 (swirl).

    Maximizes ||v*(T F)||_{H19/12} / ||F*||_{L2} over random forcings with
    only radial/axial components, and the swirl analogue over azimuthal
    forcings.  The maxima over the sample family are the calibrated
    constants stored in the config for bounded-set checks.
    """
    if grid is None or modes is None:
        grid, modes = grids_from_config(config)
    base = hagen_poiseuille(config.phi, grid)
    ops = ModeOperatorSet(base, grid, modes)
    rng = rng_from_seed(seed)
    zero = np.zeros((grid.n, modes.n_z))
    c1 = 0.0
    c2 = 0.0
    for _ in range(n_samples):
        f = random_forcing(rng, grid, modes)
        fstar = ForcingField(fr=f.fr, ftheta=zero, fz=f.fz)
        ftheta = ForcingField(fr=zero, ftheta=f.ftheta, fz=zero)
        norm_star = np.sqrt(weighted_l2(f.fr, grid, modes) ** 2
                            + weighted_l2(f.fz, grid, modes) ** 2)
        norm_theta = weighted_l2(f.ftheta, grid, modes)
        st = linear_solve_T(fstar, base, grid, modes, ops)
        v = velocity_from_stream(st, grid, modes)
        c1 = max(c1, sobolev_norm(v, 19.0 / 12.0, grid, modes) / norm_star)
        sw = linear_solve_T(ftheta, base, grid, modes, ops)
        vt = velocity_from_stream(sw, grid, modes)
        c2 = max(c2, sobolev_norm(vt, 19.0 / 12.0, grid, modes) / norm_theta)
    return c1, c2


def momentum_curl_residual(state: StreamState, F: ForcingField,
                           config: FlowConfig, grid: RadialGrid,
                           modes: ModeSet) -> dict:
    """Curl-form residual of the full steady momentum balance.

    Assembles R = Ubar dz v + (v . grad) Ubar - Lap v + (v . grad) v - F
    from the reconstructed velocity field and measures (a) the azimuthal
    component of curl R and (b) the azimuthal component R^theta itself
    (which carries no pressure gradient), both relative to the summed
    sizes of the individual terms.  Nonlinear products are formed exactly
    as in the iteration (same dealiasing), so the residual reflects
    discretization and closure quality, not bookkeeping mismatches.
    """
    base = hagen_poiseuille(config.phi, grid)
    L = assemble_L(grid).matrix
    r = grid.nodes[:, None]
    xi = modes.frequencies[None, :]
    v = velocity_from_stream(state, grid, modes)
    om = vorticity_from_velocity(v, grid, modes)

    def hat(g):
        return forward_transform(g, modes)

    def phys(gh):
        return inverse_transform(gh, modes)

    vr_h, vt_h, vz_h = hat(v.vr), hat(v.vtheta), hat(v.vz)
    dz = lambda gh: 1j * xi * gh
    dzvr, dzvz, dzvt = phys(dz(vr_h)), phys(dz(vz_h)), phys(dz(vt_h))
    drvr, drvz, drvt = phys(grid.d1 @ vr_h), phys(grid.d1 @ vz_h), phys(grid.d1 @ vt_h)

    def deal(g):
        gh = dealias_modes(hat(g), modes) if config.dealias else project_nyquist(hat(g), modes)
        return phys(gh)

    conv_r = deal(v.vr * drvr + v.vz * dzvr - v.vtheta * (v.vtheta / r))
    conv_z = deal(v.vr * drvz + v.vz * dzvz)
    conv_t = deal(v.vr * drvt + v.vz * dzvt + v.vr * (v.vtheta / r))

    # vector Laplacian: scalar part via the assembled L (plus the 1/r^2
    # shift for the z component, which has no curvature sink)
    lap_r = phys(L @ vr_h + dz(dz(vr_h)))
    lap_t = phys(L @ vt_h + dz(dz(vt_h)))
    lap_z = phys(L @ vz_h + (1.0 / r**2) * vz_h + dz(dz(vz_h)))

    ubar = base.profile[:, None]
    dubar = (-4.0 * config.phi / np.pi) * grid.nodes[:, None]

    term_r = [ubar * dzvr, conv_r, -lap_r, -F.fr]
    term_z = [ubar * dzvz, v.vr * dubar, conv_z, -lap_z, -F.fz]
    term_t = [ubar * dzvt, conv_t, -lap_t, -F.ftheta]

    def curl_theta(gr, gz):
        return phys(dz(hat(gr)) - grid.d1 @ hat(gz))

    num_curl = weighted_l2(curl_theta(sum(term_r), sum(term_z)), grid, modes)
    den_curl = sum(weighted_l2(curl_theta(tr, np.zeros_like(tr)), grid, modes)
                   for tr in term_r)
    den_curl += sum(weighted_l2(curl_theta(np.zeros_like(tz), tz), grid, modes)
                    for tz in term_z)
    num_theta = weighted_l2(sum(term_t), grid, modes)
    den_theta = sum(weighted_l2(t, grid, modes) for t in term_t)
    return {
        "curl_theta_relative": num_curl / max(den_curl, 1e-300),
        "theta_component_relative": num_theta / max(den_theta, 1e-300),
    }
