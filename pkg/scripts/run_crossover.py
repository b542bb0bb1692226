#!/usr/bin/env python3
"""Raw-noisy vs kernel-filtered training across SNR for f2 and f3.

Runs both filter bandwidths 0.1 and 0.11 (the two values quoted for this
experiment) so the crossover can be compared under either.
"""

import argparse
import os
import sys

from kanlab.cli import main

SNR_GRID = "-8,-6,-4,-2,0,2,4,8,15"

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/crossover")
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--n", type=int, default=3000)
    ap.add_argument("--workers", type=int, default=os.cpu_count())
    args = ap.parse_args()
    for fn in ("f2", "f3"):
        for sigma in (0.1, 0.11):
            code = main([
                "crossover", "--fn", fn, "--filter-sigma", str(sigma),
                "--snr-grid", SNR_GRID, "--n", str(args.n),
                "--seeds", str(args.seeds), "--workers", str(args.workers),
                "--out", f"{args.out}/{fn}_sigma{sigma}",
            ])
            if code != 0:
                sys.exit(code)
    sys.exit(0)
