"""Run the configured experiments and write their outputs under ``runs/``.

    python scripts/run_experiments.py                 # every config in configs/
    python scripts/run_experiments.py configs/rate_d2.json --workers 4
"""

from __future__ import annotations

import argparse
import json
import logging
import time
from pathlib import Path

from anisosvm.config import load_config
from anisosvm.errors import NumericalFailureError
from anisosvm.harness import run_experiment

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("configs", nargs="*", type=Path)
    parser.add_argument("--out", type=Path, default=ROOT / "runs")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    paths = args.configs or sorted((ROOT / "configs").glob("*.json"))
    summary = {}
    for path in paths:
        cfg = load_config(path).replace(workers=args.workers)
        out = args.out / path.stem
        start = time.perf_counter()
        try:
            report = run_experiment(cfg, out)
        except NumericalFailureError as exc:
            logging.error("%s: %s", path.name, exc)
            summary[path.stem] = {"error": str(exc)}
            continue
        result = report.to_dict()
        summary[path.stem] = {
            "seconds": round(time.perf_counter() - start, 1),
            "passed": report.passed,
            "checks": result["checks"],
        }
        logging.info("%s -> %s (passed: %s)", path.name, out, report.passed)
    print(json.dumps(summary, indent=2))


if __name__ == "__main__":
    main()
