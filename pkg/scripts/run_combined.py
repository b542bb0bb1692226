#!/usr/bin/env python3
"""Oversampling combined with kernel filtering, one table for f1, f2, f3.

Each function uses its study SNR (7.38, 4.46, 10.53 dB); columns cover the
clean baseline, the noisy run, filter-only, plain oversampling, and
oversampling with a sigma=0.1 filter on top.
"""

import argparse
import os
import sys

from kanlab.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/combined")
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--n-base", type=int, default=500)
    ap.add_argument("--r-values", type=str, default="1,25,50")
    ap.add_argument("--workers", type=int, default=os.cpu_count())
    args = ap.parse_args()
    sys.exit(main([
        "combined", "--functions", "f1,f2,f3", "--snrs", "7.38,4.46,10.53",
        "--r-values", args.r_values, "--filter-sigma", "0.1",
        "--n-base", str(args.n_base), "--seeds", str(args.seeds),
        "--workers", str(args.workers), "--out", args.out,
    ]))
