"""Command-line entry point.

    anisosvm rate --config configs/rate_d2.json --out runs/rate --check
    anisosvm compare --config configs/compare_d2.json --workers 4
    anisosvm bounds --config configs/rate_d2.json

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 failed acceptance checks (only with ``--check``).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .besov import default_order, estimate_smoothness_exponent
from .bounds import (
    Kp_constant,
    build_schedule,
    default_p,
    entropy_coefficient,
    optimal_bandwidths,
    rate_exponent,
)
from .config import ExperimentConfig, load_config
from .errors import ConfigError, InvalidArgumentError, NumericalFailureError
from .harness import run_experiment
from .synth import make_target

log = logging.getLogger("anisosvm")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_CHECK = 0, 2, 3, 4


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.replace(" ", "").split(",") if v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anisosvm", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, experiment: bool):
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("-v", "--verbose", action="store_true")
        if experiment:
            p.add_argument("--out", help="output directory (overrides config 'output')")
            p.add_argument("--seed", type=_u64)
            p.add_argument("--workers", type=int)
            p.add_argument("--n-grid", type=_int_list, help="e.g. 64,128,256")
            p.add_argument("--replicates", type=int)
            p.add_argument("--check", action="store_true", help="exit 4 when an acceptance check fails")

    for name, help_ in (
        ("rate", "rate-verification sweep"),
        ("compare", "isotropic vs anisotropic bandwidths"),
        ("subset", "full-profile vs subset schedule"),
    ):
        common(sub.add_parser(name, help=help_), experiment=True)
    common(sub.add_parser("bounds", help="print calculator values for the config's profile"), experiment=False)
    cal = sub.add_parser("calibrate", help="estimate directional smoothness of the config's target")
    common(cal, experiment=False)
    cal.add_argument("--t-min", type=float, default=1e-3)
    cal.add_argument("--t-max", type=float, default=1e-1)
    cal.add_argument("--scales", type=int, default=8)
    return parser


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    changes = {"mode": args.command}
    for key in ("seed", "workers", "replicates"):
        if getattr(args, key) is not None:
            changes[key] = getattr(args, key)
    if args.n_grid is not None:
        changes["n_grid"] = args.n_grid
    if args.out is not None:
        changes["output"] = args.out
    return cfg.replace(**changes)


def bounds_summary(cfg: ExperimentConfig) -> dict:
    profile = cfg.profile
    sched = build_schedule(profile, cfg.c1, cfg.c2)
    rows = []
    for n in cfg.n_grid:
        lam, bw, clamped = sched.at(n)
        p = default_p(n)
        rows.append(
            {
                "n": n,
                "p": p,
                "lambda": lam,
                "gamma": list(bw.gamma),
                "clamped": clamped,
                "Kp": Kp_constant(p, 1.0),
                "entropy_coefficient": entropy_coefficient(p, bw),
                "optimal_gamma": list(optimal_bandwidths(1.0 / n, n, p, profile).gamma),
            }
        )
    return {
        "alpha": list(profile.alpha),
        "alpha0": profile.alpha0,
        "rate_exponent": rate_exponent(profile.alpha0, profile.d),
        "log_power": profile.log_power,
        "schedule": rows,
    }


def calibrate_summary(cfg: ExperimentConfig, t_min: float, t_max: float, scales: int) -> list[dict]:
    f = make_target(cfg.target)
    ts = np.geomspace(t_min, t_max, scales)
    domain = [(0.0, 1.0)] * cfg.d
    out = []
    for i in cfg.target.active_dims:
        declared = cfg.target.declared_alpha[i]
        r = default_order(declared)
        # few anchors keep this quick; product targets vary only in scale across slices
        est = estimate_smoothness_exponent(f, i, ts, r, domain, anchors=16)
        out.append({"dim": i, "declared_alpha": declared, "order": r, "estimated_alpha": est})
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        if args.command == "bounds":
            print(json.dumps(bounds_summary(cfg), indent=2))
            return EXIT_OK
        if args.command == "calibrate":
            print(json.dumps(calibrate_summary(cfg, args.t_min, args.t_max, args.scales), indent=2))
            return EXIT_OK
        cfg = _apply_overrides(cfg, args)
        log.info("%s: %d sample sizes x %d replicates", cfg.mode, len(cfg.n_grid), cfg.replicates)
        report = run_experiment(cfg)
    except (ConfigError, InvalidArgumentError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(json.dumps(report.to_dict(), indent=2))
    if args.check and not report.passed:
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
