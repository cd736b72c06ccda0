"""Diagnose where per-n tuning places its selections on the multiplier grid.

Runs the config's arm(s) at a few sample sizes and reports, per arm, the
distribution of selected ``c1``/``c2`` multipliers and how many cells landed
on a grid edge. When selections pile up at one edge, move the config's
``c1``/``c2`` toward the median selection and rerun. The rule looks only at
the selections and never at the fitted slope.

    python scripts/center_grid.py configs/rate_d2.json --n 128,512,2048 --replicates 6
"""

from __future__ import annotations

import argparse
import json
from collections import defaultdict

import numpy as np

from anisosvm.config import load_config
from anisosvm.harness import run_experiment


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("config")
    parser.add_argument("--n", default="128,512,2048", help="comma-separated sample sizes")
    parser.add_argument("--replicates", type=int, default=6)
    parser.add_argument("--mc-samples", type=int, default=2000)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    cfg = load_config(args.config)
    grid = tuple(int(v) for v in args.n.split(","))
    run = cfg.replace(
        tune="per_n", n_grid=grid, replicates=args.replicates, mc_samples=args.mc_samples,
        workers=args.workers, slope_window=None, output=None,
    )
    report = run_experiment(run)
    by_arm = defaultdict(list)
    for row in report.rows:
        if row.ok:
            by_arm[row.mode].append(row)

    out = {"center": {"c1": cfg.c1, "c2": list(cfg.c2)}, "arms": {}}
    for arm, rows in by_arm.items():
        a = np.array([r.c1_scale for r in rows])
        b = np.array([r.c2_scale for r in rows])
        med_a, med_b = float(np.exp(np.median(np.log(a)))), float(np.exp(np.median(np.log(b))))
        out["arms"][arm] = {
            "cells": len(rows),
            "grid_edge_cells": int(sum(r.grid_edge for r in rows)),
            "c1_scale_counts": {repr(float(v)): int(c) for v, c in zip(*np.unique(a, return_counts=True))},
            "c2_scale_counts": {repr(float(v)): int(c) for v, c in zip(*np.unique(b, return_counts=True))},
            "median_c1_scale": med_a,
            "median_c2_scale": med_b,
            "suggested_c1": cfg.c1 * med_a,
            "suggested_c2": [c * med_b for c in cfg.c2],
        }
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
