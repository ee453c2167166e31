#!/usr/bin/env python3
"""Empirical convergence boundary of the fixed-point iteration.

The theory guarantees convergence for flux above an (unspecified) lower
threshold when the forcing norm scales like phi^(1/96).  This scan runs
the iteration over a flux grid at several forcing amplitudes and records
where it stops converging, which is the artifact-side answer to "where is
the boundary, really".

    python scripts/convergence_boundary.py --out results
"""

import argparse
import sys
from pathlib import Path

from pipeflow import FlowConfig, grids_from_config, picard_solve
from pipeflow.io import write_csv, write_report
from pipeflow.sampling import normalized_forcing, rng_from_seed


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--phis", default="0.01,0.1,1,3,10,30,100,1000")
    ap.add_argument("--amplitudes", default="1,4,16,64,256",
                    help="forcing norm as multiples of phi^(1/96)")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    base_cfg = FlowConfig(picard_max_iter=60)
    grid, modes = grids_from_config(base_cfg)
    phis = [float(x) for x in args.phis.split(",")]
    amps = [float(x) for x in args.amplitudes.split(",")]

    rows = []
    boundary = {}
    for amp in amps:
        lowest_converged = None
        for phi in phis:
            cfg = base_cfg.replace(phi=phi)
            forcing = normalized_forcing(rng_from_seed(args.seed), grid, modes,
                                         amp * phi ** (1 / 96.0))
            _, rep = picard_solve(forcing, cfg, grid, modes, seed=args.seed)
            rows.append((amp, phi, rep.status, rep.iterations,
                         rep.residuals[-1] if rep.residuals else float("nan")))
            print(f"amp={amp:g} phi={phi:g}: {rep.status} "
                  f"({rep.iterations} iterations)")
            if rep.status == "converged" and lowest_converged is None:
                lowest_converged = phi
        boundary[str(amp)] = lowest_converged
    write_csv(out / "convergence_scan.csv",
              ["amplitude", "phi", "status", "iterations", "final_residual"], rows)
    write_report({"lowest_converged_phi_per_amplitude": boundary,
                  "phis": phis, "amplitudes": amps, "seed": args.seed},
                 out / "convergence_boundary.json")
    print(f"reports in {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
