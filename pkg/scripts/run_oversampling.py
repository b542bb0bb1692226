#!/usr/bin/env python3
"""Test loss versus training-set multiple r at fixed SNR.

f1 and f2 with their standard [2,5,1] network, then f3 with both the
minimal [4,2,1,1] stack and the wider [4,4,2,1] one; the narrow stack is
the one known to misbehave as data grows.
"""

import argparse
import os
import sys

from kanlab.cli import main

R_GRID = "1,2,3,5,8,12,18,25"

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/oversampling")
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--n-base", type=int, default=500)
    ap.add_argument("--snr-grid", type=str, default="0,5,10")
    ap.add_argument("--workers", type=int, default=os.cpu_count())
    args = ap.parse_args()
    runs = [("f1", None), ("f2", None), ("f3", "4,2,1,1"), ("f3", "4,4,2,1")]
    for fn, shape in runs:
        label = fn if shape is None else f"{fn}_{shape.replace(',', '-')}"
        argv = ["oversample", "--fn", fn, "--n-base", str(args.n_base),
                "--r-grid", R_GRID, "--snr-grid", args.snr_grid,
                "--seeds", str(args.seeds), "--workers", str(args.workers),
                "--out", f"{args.out}/{label}"]
        if shape is not None:
            argv += ["--shape", shape]
        code = main(argv)
        if code != 0:
            sys.exit(code)
    sys.exit(0)
