#!/usr/bin/env python3
"""Clean-vs-noisy test loss for f1, f2, f3 (the degradation table).

Defaults: 3000 training samples, label noise sigma 0.2, five seeds.
"""

import argparse
import os
import sys

from kanlab.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/noise_table")
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--workers", type=int, default=os.cpu_count())
    args = ap.parse_args()
    sys.exit(main([
        "noise-table", "--functions", "f1,f2,f3", "--n", "3000",
        "--sigma", "0.2", "--seeds", str(args.seeds),
        "--workers", str(args.workers), "--out", args.out,
    ]))
