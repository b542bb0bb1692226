#!/usr/bin/env python3
"""Filter-bandwidth sweeps for f4, f5, f6 under several SNRs.

Runs the 500-sample sweep and the 10x (5000-sample) sweep, which shows the
bandwidth mattering less once data is plentiful.
"""

import argparse
import os
import sys

from kanlab.cli import main

SIGMA_GRID = "0.02,0.05,0.1,0.18,0.3,0.5,0.8"
SNR_GRID = "-5,0,5,15"

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/sigma_sweep")
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--workers", type=int, default=os.cpu_count())
    ap.add_argument("--sizes", type=str, default="500,5000")
    args = ap.parse_args()
    for fn in ("f4", "f5", "f6"):
        for n in (int(s) for s in args.sizes.split(",")):
            code = main([
                "sigma-sweep", "--fn", fn, "--sigma-grid", SIGMA_GRID,
                "--snr-grid", SNR_GRID, "--n", str(n),
                "--seeds", str(args.seeds), "--workers", str(args.workers),
                "--out", f"{args.out}/{fn}_n{n}",
            ])
            if code != 0:
                sys.exit(code)
    sys.exit(0)
