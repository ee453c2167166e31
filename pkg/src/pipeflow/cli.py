"""Command-line entry point.

Subcommands:
  solve-linear        one application of the linear solution operator to a
                      forcing file (JSON layout of io.write_forcing_json)
  solve-nonlinear     fixed-point solve with a sampled or file forcing
  sweep-phi           flux-scaling sweep for one case tag
  decay-fit           nonlinear solve plus far-field decay fit
  check-inequalities  the three weighted-inequality suites
  calibrate           estimate the solution-operator gain constants

Exit codes: 0 success, 1 assertion failure (an inequality violated, a
sweep drifting upward, a non-converged solve), 2 usage error.  All
randomness flows from --seed, and reports embed the seed; rerunning any
subcommand with the same config and seed writes byte-identical files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import analysis, io
from .config import ConfigError, FlowConfig, dumps_config, load_config
from .fields import velocity_from_stream
from .grid import grids_from_config
from .modesolve import hagen_poiseuille
from .nonlinear import (ModeOperatorSet, calibrate_constants, linear_solve_T,
                        momentum_curl_residual, picard_solve, uniqueness_probe)
from .norms import norm_report
from .sampling import normalized_forcing, rng_from_seed

USAGE_ERROR = 2
CHECK_FAILED = 1


def _add_common(p):
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--verbose", action="store_true")
    p.add_argument("--phi", type=float, default=None, help="override config phi")


def _load(args) -> FlowConfig:
    config = load_config(args.config) if args.config else FlowConfig()
    if args.phi is not None:
        config = config.replace(phi=args.phi)
    return config


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _sampled_forcing(config, grid, modes, seed, z_profile="gauss"):
    rng = rng_from_seed(seed)
    target = config.phi ** (1.0 / 96.0)
    return normalized_forcing(rng, grid, modes, target, z_profile=z_profile)


def cmd_solve_linear(args) -> int:
    config = _load(args)
    grid, modes = grids_from_config(config)
    if args.forcing:
        forcing = io.read_forcing_json(args.forcing, grid, modes)
    else:
        forcing = _sampled_forcing(config, grid, modes, args.seed)
    base = hagen_poiseuille(config.phi, grid)
    ops = ModeOperatorSet(base, grid, modes)
    diagnostics = [] if args.verbose else None
    state = linear_solve_T(forcing, base, grid, modes, ops, diagnostics)
    out = _outdir(args)
    v = velocity_from_stream(state, grid, modes)
    io.write_report(norm_report(v, state, grid, modes), out / "norms.json")
    io.write_state_json(out / "state.json", grid, modes, state)
    if args.verbose:
        io.write_csv(out / "mode_diagnostics.csv",
                     ["equation", "xi", "residual", "condition_estimate"],
                     diagnostics)
        from .radial import assemble_L, export_operator_csv
        export_operator_csv(assemble_L(grid), out / "operator_L.csv")
    return 0


def cmd_solve_nonlinear(args) -> int:
    config = _load(args)
    grid, modes = grids_from_config(config)
    if args.forcing:
        forcing = io.read_forcing_json(args.forcing, grid, modes)
    else:
        forcing = _sampled_forcing(config, grid, modes, args.seed)
    state, report = picard_solve(forcing, config, grid, modes, seed=args.seed)
    out = _outdir(args)
    io.write_report(report, out / "iteration.json")
    io.write_csv(out / "residuals.csv", ["iteration", "residual"],
                 list(enumerate(report.residuals)))
    v = velocity_from_stream(state, grid, modes)
    io.write_report(norm_report(v, state, grid, modes), out / "norms.json")
    curl = momentum_curl_residual(state, forcing, config, grid, modes)
    io.write_report(curl, out / "momentum_residual.json")
    if args.verbose:
        io.write_state_json(out / "state.json", grid, modes, state)
    return 0 if report.converged else CHECK_FAILED


def cmd_sweep_phi(args) -> int:
    config = _load(args)
    try:
        phis = [float(x) for x in args.phis.split(",")]
    except ValueError:
        print(f"could not parse --phis {args.phis!r}", file=sys.stderr)
        return USAGE_ERROR
    try:
        case = analysis.canonical_case(args.case)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return USAGE_ERROR
    grid, modes = grids_from_config(config)
    report = analysis.phi_sweep(case, phis, args.samples, config, seed=args.seed,
                                grid=grid, modes=modes)
    out = _outdir(args)
    slug = case.replace("→", "-to-").replace("/", "_").replace(":", "-")
    io.write_report(report, out / f"sweep_{slug}.json")
    io.write_csv(out / f"sweep_{slug}.csv",
                 ["phi", "worst_ratio", "normalized_ratio"],
                 list(zip(report.phis, report.worst_ratios, report.normalized_ratios)))
    if args.verbose:
        print(f"{case}: slope {report.fitted_slope:.4f}, "
              f"normalized spread {report.normalized_spread:.3f}, "
              f"upward drift {report.upward_drift:.3f}")
    return 0 if report.upward_drift <= 3.0 else CHECK_FAILED


def cmd_decay_fit(args) -> int:
    config = _load(args)
    if config.n_z < 512:
        # far-field tails span many decades; give the modes headroom
        config = config.replace(n_z=max(config.n_z, 512))
    grid, modes = grids_from_config(config)
    forcing = _sampled_forcing(config, grid, modes, args.seed, z_profile="gauss")
    state, report = picard_solve(forcing, config, grid, modes, seed=args.seed)
    if not report.converged:
        print("nonlinear solve did not converge", file=sys.stderr)
        return CHECK_FAILED
    v = velocity_from_stream(state, grid, modes)
    window = [float(x) for x in args.window.split(",")]
    decay = analysis.fit_decay_rate(v, window, grid, modes, phi=config.phi,
                                    forcing_support=2.0)
    out = _outdir(args)
    io.write_report(decay, out / "decay.json")
    ok = (not decay.below_floor) and decay.alpha_total > 0 \
        and decay.r_squared_total >= 0.99
    return 0 if ok else CHECK_FAILED


def cmd_check_inequalities(args) -> int:
    config = _load(args)
    grid, _ = grids_from_config(config)
    from .sampling import random_poincare_family, random_smooth_family
    rng = rng_from_seed(args.seed)
    fam_any = random_poincare_family(rng, grid, 50) \
        + random_poincare_family(rng, grid, 50, wall_zero=True)
    rep_p = analysis.check_poincare(fam_any, grid)
    fam_hlp = random_poincare_family(rng_from_seed(args.seed + 1), grid, 100)
    rep_h = analysis.check_hlp(fam_hlp, grid)
    fam_w = random_smooth_family(rng_from_seed(args.seed + 2), grid, 100)
    rep_w = analysis.check_weighted_interpolation(fam_w, grid)
    out = _outdir(args)
    io.write_report(rep_p, out / "inequality_poincare.json")
    io.write_report(rep_h, out / "inequality_hlp.json")
    io.write_report(rep_w, out / "inequality_interpolation.json")
    violations = rep_p.violations + rep_h.violations + rep_w.violations
    if args.verbose:
        for rep in (rep_p, rep_h, rep_w):
            print(f"{rep.lemma}: {rep.violations} violations, "
                  f"worst slack {rep.worst_slack:.3e}")
    return 0 if violations == 0 else CHECK_FAILED


def cmd_calibrate(args) -> int:
    config = _load(args)
    grid, modes = grids_from_config(config)
    c1, c2 = calibrate_constants(config, grid, modes, n_samples=args.samples,
                                 seed=args.seed)
    out = _outdir(args)
    io.write_report({"c1_cal": c1, "c2_cal": c2, "phi": config.phi,
                     "n_samples": args.samples, "seed": args.seed},
                    out / "calibration.json")
    (out / "calibrated.cfg").write_text(
        dumps_config(config.replace(c1_cal=c1, c2_cal=c2)), encoding="utf-8")
    return 0


def cmd_uniqueness(args) -> int:
    config = _load(args)
    grid, modes = grids_from_config(config)
    forcing = _sampled_forcing(config, grid, modes, args.seed)
    result = uniqueness_probe(forcing, config, n_seeds=args.seeds, seed=args.seed,
                              grid=grid, modes=modes)
    out = _outdir(args)
    io.write_report(result, out / "uniqueness.json")
    return 0 if result["n_failed"] == 0 else CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pipeflow",
        description="Spectral solver and verification harness for steady "
                    "axisymmetric pipe-flow perturbations.")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("solve-linear", help="apply the linear solution operator")
    _add_common(p)
    p.add_argument("--forcing", default=None, help="forcing JSON file")
    p.set_defaults(func=cmd_solve_linear)

    p = sub.add_parser("solve-nonlinear", help="fixed-point nonlinear solve")
    _add_common(p)
    p.add_argument("--forcing", default=None, help="forcing JSON file")
    p.set_defaults(func=cmd_solve_nonlinear)

    p = sub.add_parser("sweep-phi", help="flux-scaling sweep for one case")
    _add_common(p)
    p.add_argument("--case", required=True)
    p.add_argument("--phis", required=True, help="comma-separated flux values")
    p.add_argument("--samples", type=int, default=12)
    p.set_defaults(func=cmd_sweep_phi)

    p = sub.add_parser("decay-fit", help="solve then fit far-field decay")
    _add_common(p)
    p.add_argument("--window", default="5,12")
    p.set_defaults(func=cmd_decay_fit)

    p = sub.add_parser("check-inequalities", help="weighted inequality suites")
    _add_common(p)
    p.set_defaults(func=cmd_check_inequalities)

    p = sub.add_parser("calibrate", help="estimate c1_cal/c2_cal")
    _add_common(p)
    p.add_argument("--samples", type=int, default=50)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("uniqueness-probe", help="multi-seed convergence probe")
    _add_common(p)
    p.add_argument("--seeds", type=int, default=5)
    p.set_defaults(func=cmd_uniqueness)

    return parser


def run_command(argv) -> int:
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return USAGE_ERROR
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0,) else 0
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return USAGE_ERROR
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (FileNotFoundError, ValueError) as exc:
        print(str(exc), file=sys.stderr)
        return USAGE_ERROR


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
