#!/usr/bin/env python3
"""Full verification run: calibration, inequality suites, a priori
constants, flux-scaling sweeps, and far-field decay, all written as JSON
and CSV reports under an output directory.

    python scripts/run_verification.py --out results --seed 0
"""

import argparse
import sys
import time
from pathlib import Path

from pipeflow import FlowConfig, grids_from_config, picard_solve, velocity_from_stream
from pipeflow.analysis import SCALING_CASES, apriori_sweep, fit_decay_rate, phi_sweep
from pipeflow.cli import run_command
from pipeflow.io import write_csv, write_report
from pipeflow.nonlinear import calibrate_constants
from pipeflow.sampling import normalized_forcing, rng_from_seed


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=8)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()

    config = FlowConfig()
    grid, modes = grids_from_config(config)

    print("calibrating solution-operator gains ...")
    c1, c2 = calibrate_constants(config, grid, modes, n_samples=20, seed=args.seed)
    write_report({"c1_cal": c1, "c2_cal": c2, "seed": args.seed}, out / "calibration.json")

    print("inequality suites ...")
    code = run_command(["check-inequalities", "--seed", str(args.seed),
                        "--out", str(out / "inequalities")])
    if code != 0:
        print("inequality violation detected", file=sys.stderr)
        return code

    print("a priori bound constants ...")
    rep = apriori_sweep([0.2, 1.0, 5.0, 25.0], [10.0, 100.0, 1000.0], config,
                        n_samples=20, seed=args.seed, grid=grid)
    write_report(rep, out / "apriori_constants.json")
    rows = [(key.split(",")[0], key.split(",")[1], rep.stream_constants[key],
             rep.swirl_constants[key]) for key in sorted(rep.stream_constants)]
    write_csv(out / "apriori_constants.csv",
              ["xi", "phi", "stream_constant", "swirl_constant"], rows)

    print("flux-scaling sweeps ...")
    rows = []
    for case in SCALING_CASES:
        srep = phi_sweep(case, [100.0, 1000.0, 10000.0], args.samples, config,
                         seed=args.seed, grid=grid, modes=modes)
        slug = case.replace("→", "-to-").replace("/", "_").replace(":", "-")
        write_report(srep, out / f"sweep_{slug}.json")
        for phi, ratio, norm in zip(srep.phis, srep.worst_ratios, srep.normalized_ratios):
            rows.append((case, phi, ratio, norm, srep.fitted_slope))
        print(f"  {case}: slope {srep.fitted_slope:+.3f}, "
              f"upward drift {srep.upward_drift:.2f}")
    write_csv(out / "sweeps.csv",
              ["case", "phi", "worst_ratio", "normalized_ratio", "fitted_slope"], rows)

    print("nonlinear solve + far-field decay ...")
    decay_cfg = config.replace(n_z=512)
    dgrid, dmodes = grids_from_config(decay_cfg)
    rows = []
    for phi in (10.0, 100.0):
        cfg = decay_cfg.replace(phi=phi)
        forcing = normalized_forcing(rng_from_seed(args.seed + 3), dgrid, dmodes,
                                     phi ** (1 / 96.0), z_profile="gauss")
        state, irep = picard_solve(forcing, cfg, dgrid, dmodes, seed=args.seed)
        v = velocity_from_stream(state, dgrid, dmodes)
        dec = fit_decay_rate(v, (5.0, 12.0), dgrid, dmodes, phi=phi,
                             forcing_support=2.0)
        write_report(dec, out / f"decay_phi{phi:g}.json")
        rows.append((phi, irep.status, dec.alpha_total, dec.r_squared_total))
        print(f"  phi={phi:g}: {irep.status}, alpha={dec.alpha_total:.3f}, "
              f"R2={dec.r_squared_total:.5f}")
    write_csv(out / "decay.csv", ["phi", "status", "alpha", "r_squared"], rows)

    print(f"done in {time.monotonic() - t0:.0f}s; reports in {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
