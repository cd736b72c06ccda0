"""Experiment engine: rate sweeps, isotropic/anisotropic comparisons, subset runs.

Every (n, replicate) cell is an independent job. A cell draws its data from
``derive_seed(cfg.seed, n, replicate)``, optionally tunes the schedule
multipliers on a validation split, refits on the full sample and estimates
the clipped excess risk by Monte Carlo with the same seed. Cells run either
in-process or on a spawn-based process pool; BLAS is pinned to one thread in
both cases so results do not depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats
from threadpoolctl import threadpool_limits

from .besov import SmoothnessProfile
from .bounds import RateSchedule, build_schedule, rate_exponent
from .config import ExperimentConfig
from .errors import InvalidArgumentError, NumericalFailureError
from .kernel import Bandwidths
from .solver import Dataset, clip, fit, predict
from .synth import (
    SamplingSpec,
    default_clip_bound,
    derive_seed,
    excess_risk,
    excess_risk_difference,
    make_target,
    sample_dataset,
)

__all__ = [
    "Arm",
    "CellResult",
    "RateReport",
    "CompareReport",
    "SubsetReport",
    "fit_loglog_slope",
    "tuning_multipliers",
    "run_rate_experiment",
    "compare_iso_aniso",
    "run_subset_experiment",
    "run_experiment",
    "rerun_row",
    "write_outputs",
    "results_csv",
]

PILOT_KEY = 0
"""Sample-size slot of the seed key reserved for pilot samples (n >= 2 elsewhere)."""


def fit_loglog_slope(points: Sequence[tuple[float, float]]) -> tuple[float, float, float, float]:
    """OLS of ``log risk`` on ``log n``: ``(slope, intercept, r_squared, slope_stderr)``.

    The standard error is NaN when only two distinct sample sizes are given.
    """
    pts = [(float(n), float(r)) for n, r in points]
    if any(not r > 0 for _, r in pts):
        raise InvalidArgumentError("risks must be positive to take logarithms")
    if any(not n > 0 for n, _ in pts):
        raise InvalidArgumentError("sample sizes must be positive")
    x = np.log([n for n, _ in pts])
    y = np.log([r for _, r in pts])
    if np.unique(x).size < 2:
        raise InvalidArgumentError("need at least two distinct sample sizes")
    xc = x - x.mean()
    sxx = float(xc @ xc)
    slope = float(xc @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    ss_res = float(resid @ resid)
    ss_tot = float((y - y.mean()) @ (y - y.mean()))
    r2 = 1.0 if ss_tot <= 1e-300 else 1.0 - ss_res / ss_tot
    k = x.size
    stderr = math.sqrt(ss_res / (k - 2) / sxx) if k > 2 else float("nan")
    return slope, intercept, r2, stderr


def tuning_multipliers(size: int, span: float) -> np.ndarray:
    """``size`` log-spaced multipliers covering a factor ``span`` centred on 1."""
    if size == 1:
        return np.ones(1)
    return span ** np.linspace(-0.5, 0.5, size)


@dataclass(frozen=True)
class Arm:
    """One bandwidth family evaluated in a cell.

    An isotropic arm shares a single width across coordinates: the geometric
    mean of the schedule's per-coordinate widths, times the width multiplier.
    """

    label: str
    schedule: RateSchedule
    isotropic: bool = False

    def params(self, n: int, c1_scale: float = 1.0, c2_scale: float = 1.0) -> tuple[float, Bandwidths, bool]:
        if not self.isotropic:
            return self.schedule.at(n, c1_scale, c2_scale)
        lam = self.schedule.c1 * c1_scale * float(n) ** self.schedule.exponent_lambda
        # same arithmetic as RateSchedule.at; equal widths are reused verbatim so
        # constant smoothness reproduces the anisotropic grid bit for bit
        raw = [1.0 if e is None else c * c2_scale * float(n) ** e for c, e in zip(self.schedule.c2, self.schedule.exponents_gamma)]
        g = raw[0] if len(set(raw)) == 1 else math.exp(math.fsum(map(math.log, raw)) / len(raw))
        return lam, Bandwidths.isotropic(min(g, 1.0), self.schedule.d), g > 1.0


@dataclass
class CellResult:
    mode: str
    n: int
    replicate: int
    seed: int
    lam: float = float("nan")
    gamma: tuple[float, ...] = ()
    risk: float = float("nan")
    risk_se: float = float("nan")
    c1_scale: float = float("nan")
    c2_scale: float = float("nan")
    grid_edge: bool = False
    clamped: bool = False
    pair_se: float = float("nan")
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and math.isfinite(self.risk)


@dataclass(frozen=True)
class _Job:
    cfg: ExperimentConfig
    arms: tuple[Arm, ...]
    clip_bound: float
    n: int
    replicate: int
    # One (c1_scale, c2_scale, grid_edge) triple per arm when tuned beforehand.
    fixed: tuple[tuple[float, float, bool], ...] | None = None


def _split(data: Dataset, fraction: float) -> tuple[Dataset, Dataset]:
    n_val = max(1, int(round(fraction * data.n)))
    n_tr = data.n - n_val
    if n_tr < 1:
        raise InvalidArgumentError(f"sample of size {data.n} is too small to split")
    return data.subset(slice(0, n_tr)), data.subset(slice(n_tr, None))


def _tune(arm: Arm, data: Dataset, cfg: ExperimentConfig) -> tuple[float, float, bool]:
    """Grid search of (c1, c2) multipliers by clipped validation error.

    Ties keep the earlier grid point, so the search is deterministic.
    """
    mults = tuning_multipliers(cfg.tune_grid_size, cfg.tune_span)
    train, val = _split(data, cfg.validation_fraction)
    best = (math.inf, 0, 0)
    for i, a in enumerate(mults):
        for j, b in enumerate(mults):
            lam, bw, _ = arm.params(train.n, a, b)
            model = fit(train, lam, bw)
            err = float(np.mean((clip(predict(model, val.inputs), data.clip_bound) - val.responses) ** 2))
            if err < best[0]:
                best = (err, i, j)
    _, i, j = best
    last = mults.size - 1
    edge = last > 0 and (i in (0, last) or j in (0, last))
    return float(mults[i]), float(mults[j]), edge


def _dataset(cfg: ExperimentConfig, n: int, seed: int, M: float) -> Dataset:
    samp = SamplingSpec(n=n, d=cfg.d, noise_sd=cfg.noise_sd, seed=seed, noise=cfg.noise)
    return sample_dataset(make_target(cfg.target), samp, M, f_sup=cfg.target.sup_bound)


def _run_cell(job: _Job) -> list[CellResult]:
    cfg, n, rep = job.cfg, job.n, job.replicate
    seed = derive_seed(cfg.seed, n, rep)
    rows = [CellResult(arm.label, n, rep, seed) for arm in job.arms]
    try:
        with threadpool_limits(limits=1):
            data = _dataset(cfg, n, seed, job.clip_bound)
            models = []
            for k, (arm, row) in enumerate(zip(job.arms, rows)):
                if job.fixed is not None:
                    a, b, edge = job.fixed[k]
                elif cfg.tune == "per_n":
                    a, b, edge = _tune(arm, data, cfg)
                else:
                    a, b, edge = 1.0, 1.0, False
                lam, bw, clamped = arm.params(n, a, b)
                row.lam, row.gamma, row.clamped = lam, bw.gamma, clamped
                row.c1_scale, row.c2_scale, row.grid_edge = a, b, edge
                models.append(fit(data, lam, bw))
            target = make_target(cfg.target)
            if len(models) == 2:
                ra, sa, rb, sb, _, sd = excess_risk_difference(models[0], models[1], target, cfg.mc_samples, seed)
                rows[0].risk, rows[0].risk_se = ra, sa
                rows[1].risk, rows[1].risk_se = rb, sb
                rows[0].pair_se = rows[1].pair_se = sd
            else:
                for model, row in zip(models, rows):
                    row.risk, row.risk_se = excess_risk(model, target, cfg.mc_samples, seed)
    except (NumericalFailureError, np.linalg.LinAlgError, FloatingPointError) as exc:
        for row in rows:
            row.error = f"{type(exc).__name__}: {exc}"
    return rows


def _run_pilot(job: _Job) -> tuple[tuple[float, float, bool], ...]:
    """Tune every arm once on an independent pilot sample of this replicate."""
    cfg = job.cfg
    seed = derive_seed(cfg.seed, PILOT_KEY, job.replicate)
    with threadpool_limits(limits=1):
        data = _dataset(cfg, cfg.pilot_n, seed, job.clip_bound)
        return tuple(_tune(arm, data, cfg) for arm in job.arms)


def _map(fn, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    ctx = multiprocessing.get_context("spawn")
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs)), mp_context=ctx) as pool:
        return list(pool.map(fn, jobs))


def _sweep(cfg: ExperimentConfig, arms: tuple[Arm, ...]) -> list[CellResult]:
    M = cfg.clip_bound if cfg.clip_bound is not None else default_clip_bound(make_target(cfg.target), cfg.d)
    fixed: dict[int, tuple] = {}
    if cfg.tune == "pilot":
        pilots = [_Job(cfg, arms, M, cfg.pilot_n, r) for r in range(cfg.replicates)]
        try:
            fixed = dict(enumerate(_map(_run_pilot, pilots, cfg.workers)))
        except (NumericalFailureError, np.linalg.LinAlgError) as exc:
            raise NumericalFailureError(f"pilot tuning failed: {exc}") from exc
    jobs = [
        _Job(cfg, arms, M, n, r, fixed.get(r))
        for n in cfg.n_grid
        for r in range(cfg.replicates)
    ]
    rows: list[CellResult] = []
    for cell in _map(_run_cell, jobs, cfg.workers):
        rows.extend(cell)
    return rows


# ---------------------------------------------------------------- reports


@dataclass
class NSummary:
    n: int
    count: int
    mean_risk: float
    median_risk: float
    mean_log_risk: float
    replicate_se: float
    mean_mc_se: float


def _summaries(rows: list[CellResult], n_grid: Sequence[int]) -> list[NSummary]:
    out = []
    for n in n_grid:
        risks = np.array([r.risk for r in rows if r.n == n and r.ok])
        ses = [r.risk_se for r in rows if r.n == n and r.ok]
        if risks.size == 0:
            out.append(NSummary(n, 0, *([float("nan")] * 5)))
            continue
        sd = float(np.std(risks, ddof=1)) if risks.size > 1 else float("nan")
        out.append(
            NSummary(
                n=n,
                count=int(risks.size),
                mean_risk=math.fsum(risks) / risks.size,
                median_risk=float(np.median(risks)),
                mean_log_risk=math.fsum(np.log(risks)) / risks.size,
                replicate_se=sd / math.sqrt(risks.size),
                mean_mc_se=math.fsum(ses) / len(ses),
            )
        )
    return out


@dataclass
class RateReport:
    """Rows and the fitted rate of one arm of a sweep.

    The theoretical exponent is recomputed from ``alpha`` and
    ``active_subset`` on every access.
    """

    mode: str
    alpha: tuple[float, ...]
    active_subset: tuple[int, ...] | None
    rows: list[CellResult]
    summaries: list[NSummary]
    slope: float = float("nan")
    intercept: float = float("nan")
    r_squared: float = float("nan")
    slope_stderr: float = float("nan")
    slope_ci_halfwidth: float = float("nan")
    slope_window: tuple[float, float] | None = None
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def profile(self) -> SmoothnessProfile:
        return SmoothnessProfile(self.alpha, self.active_subset)

    @property
    def theoretical_exponent(self) -> float:
        p = self.profile
        return rate_exponent(p.alpha0, p.d)

    @property
    def theoretical_slope(self) -> float:
        return -self.theoretical_exponent

    @property
    def log_power(self) -> int:
        return self.profile.log_power

    @property
    def failures(self) -> list[CellResult]:
        return [r for r in self.rows if r.error is not None]

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "alpha": list(self.alpha),
            "active_subset": None if self.active_subset is None else list(self.active_subset),
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "slope_stderr": self.slope_stderr,
            "slope_ci_halfwidth": self.slope_ci_halfwidth,
            "theoretical_exponent": self.theoretical_exponent,
            "theoretical_slope": self.theoretical_slope,
            "log_power": self.log_power,
            "slope_window": None if self.slope_window is None else list(self.slope_window),
            "per_n": [asdict(s) for s in self.summaries],
            "clamped_cells": sum(r.clamped for r in self.rows),
            "grid_edge_cells": sum(r.grid_edge for r in self.rows),
            "failures": [{"n": r.n, "replicate": r.replicate, "error": r.error} for r in self.failures],
            "cells": _cell_dicts(self.rows),
            "checks": dict(self.checks),
            "passed": self.passed,
        }


def _rate_report(mode: str, profile: SmoothnessProfile, rows: list[CellResult], cfg: ExperimentConfig,
                 window: tuple[float, float] | None) -> RateReport:
    summaries = _summaries(rows, cfg.n_grid)
    rep = RateReport(mode, profile.alpha, profile.active_subset, rows, summaries, slope_window=window)
    pts = [(s.n, math.exp(s.mean_log_risk)) for s in summaries if s.count > 0]
    if len({n for n, _ in pts}) >= 2:
        rep.slope, rep.intercept, rep.r_squared, rep.slope_stderr = fit_loglog_slope(pts)
        if len(pts) > 2:
            rep.slope_ci_halfwidth = float(stats.t.ppf(0.975, len(pts) - 2)) * rep.slope_stderr
    if window is not None:
        rep.checks["slope_in_window"] = bool(window[0] <= rep.slope <= window[1])
    return rep


def _replicate_slopes(rows: list[CellResult], replicates: int) -> list[float]:
    out = []
    for r in range(replicates):
        pts = [(c.n, c.risk) for c in rows if c.replicate == r and c.ok]
        out.append(fit_loglog_slope(pts)[0] if len({n for n, _ in pts}) >= 2 else float("nan"))
    return out


def _cell_dicts(rows: Sequence[CellResult]) -> list[dict]:
    return [
        {
            "mode": r.mode,
            "n": r.n,
            "replicate": r.replicate,
            "c1_scale": r.c1_scale,
            "c2_scale": r.c2_scale,
            "grid_edge": r.grid_edge,
            "clamped": r.clamped,
        }
        for r in rows
    ]


def _raise_failures(rows: list[CellResult]):
    bad = [r for r in rows if r.error is not None]
    if bad:
        where = ", ".join(f"(n={r.n}, replicate={r.replicate}, {r.mode})" for r in bad[:5])
        raise NumericalFailureError(f"{len(bad)} cell(s) failed: {where}; first error: {bad[0].error}")


def run_rate_experiment(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> RateReport:
    """Sweep ``cfg.n_grid`` x replicates with the schedule of the declared profile.

    Results are written to ``out_dir`` (or ``cfg.output``) before any cell
    failure is re-raised as :class:`NumericalFailureError`.
    """
    profile = cfg.profile
    arm = Arm("rate", build_schedule(profile, cfg.c1, cfg.c2))
    rows = _sweep(cfg, (arm,))
    report = _rate_report("rate", profile, rows, cfg, cfg.slope_window)
    _persist(report, cfg, out_dir)
    _raise_failures(rows)
    return report


@dataclass
class CompareRow:
    n: int
    replicates: int
    median_iso: float
    median_aniso: float
    mean_diff: float
    median_diff: float
    diff_se: float
    aniso_wins: int
    iso_wins: int
    sign_test_p: float


@dataclass
class CompareReport:
    """Paired isotropic vs anisotropic risks; ``diff = aniso - iso``."""

    alpha: tuple[float, ...]
    rows: list[CellResult]
    per_n: list[CompareRow]
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "mode": "compare",
            "alpha": list(self.alpha),
            "per_n": [asdict(c) for c in self.per_n],
            "grid_edge_cells": sum(r.grid_edge for r in self.rows),
            "clamped_cells": sum(r.clamped for r in self.rows),
            "failures": [{"n": r.n, "replicate": r.replicate, "error": r.error} for r in self.rows if r.error],
            "cells": _cell_dicts(self.rows),
            "checks": dict(self.checks),
            "passed": self.passed,
        }


def compare_iso_aniso(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> CompareReport:
    """Tune a shared width and per-coordinate widths on identical data.

    Both arms start from the anisotropic schedule; the isotropic arm replaces
    its widths by their geometric mean, so for constant smoothness the two
    search grids coincide. Risks are evaluated on common Monte-Carlo points.
    """
    profile = cfg.profile
    sched = build_schedule(profile, cfg.c1, cfg.c2)
    arms = (Arm("compare_iso", sched, isotropic=True), Arm("compare_aniso", sched))
    rows = _sweep(cfg, arms)
    per_n = []
    isotropic_target = len(set(profile.alpha)) == 1
    checks = {}
    for n in cfg.n_grid:
        iso = {r.replicate: r for r in rows if r.n == n and r.mode == "compare_iso" and r.ok}
        ani = {r.replicate: r for r in rows if r.n == n and r.mode == "compare_aniso" and r.ok}
        reps = sorted(set(iso) & set(ani))
        if not reps:
            continue
        diffs = np.array([ani[k].risk - iso[k].risk for k in reps])
        # Arms of a replicate share their Monte-Carlo points, so the paired
        # standard error is the right scale for the mean difference.
        se = math.sqrt(math.fsum(ani[k].pair_se ** 2 for k in reps)) / len(reps)
        wins_a, wins_i = int(np.sum(diffs < 0)), int(np.sum(diffs > 0))
        p = float(stats.binomtest(wins_a, wins_a + wins_i, 0.5).pvalue) if wins_a + wins_i else 1.0
        row = CompareRow(
            n=n,
            replicates=len(reps),
            median_iso=float(np.median([iso[k].risk for k in reps])),
            median_aniso=float(np.median([ani[k].risk for k in reps])),
            mean_diff=math.fsum(diffs) / diffs.size,
            median_diff=float(np.median(diffs)),
            diff_se=se,
            aniso_wins=wins_a,
            iso_wins=wins_i,
            sign_test_p=p,
        )
        per_n.append(row)
        if isotropic_target:
            checks[f"n={n}:within_mc_noise"] = bool(abs(row.mean_diff) < 2 * se or np.all(diffs == 0))
        else:
            checks[f"n={n}:aniso_not_worse"] = bool(row.median_aniso <= row.median_iso)
    report = CompareReport(profile.alpha, rows, per_n, checks)
    _persist(report, cfg, out_dir)
    _raise_failures(rows)
    return report


@dataclass
class SubsetReport:
    full: RateReport
    subset: RateReport
    replicate_slope_diffs: list[float]
    min_slope_gain: float
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def median_slope_diff(self) -> float:
        vals = [v for v in self.replicate_slope_diffs if math.isfinite(v)]
        return float(np.median(vals)) if vals else float("nan")

    @property
    def rows(self) -> list[CellResult]:
        merged = []
        for a, b in zip(self.full.rows, self.subset.rows):
            merged.extend((a, b))
        return merged

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "mode": "subset",
            "full": self.full.to_dict(),
            "subset": self.subset.to_dict(),
            "replicate_slope_diffs": self.replicate_slope_diffs,
            "median_slope_diff": self.median_slope_diff,
            "min_slope_gain": self.min_slope_gain,
            "checks": dict(self.checks),
            "passed": self.passed,
        }


def run_subset_experiment(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> SubsetReport:
    """Full-profile schedule vs subset schedule on the same data.

    The subset schedule uses ``alpha0^I`` and pins inactive widths at 1.
    ``slope_diff = subset slope - full slope`` per replicate; the gain check
    asks for its median to be at most ``-min_slope_gain``.
    """
    full_p, sub_p = cfg.profile, cfg.subset_profile
    arms = (
        Arm("subset_full", build_schedule(full_p, cfg.c1, cfg.c2)),
        Arm("subset_active", build_schedule(sub_p, cfg.c1, cfg.c2)),
    )
    rows = _sweep(cfg, arms)
    full = _rate_report("subset_full", full_p, [r for r in rows if r.mode == "subset_full"], cfg, None)
    sub = _rate_report("subset_active", sub_p, [r for r in rows if r.mode == "subset_active"], cfg, cfg.slope_window)
    diffs = [
        s - f
        for s, f in zip(_replicate_slopes(sub.rows, cfg.replicates), _replicate_slopes(full.rows, cfg.replicates))
    ]
    report = SubsetReport(full, sub, diffs, cfg.min_slope_gain)
    report.checks["subset_steeper"] = bool(report.median_slope_diff <= -cfg.min_slope_gain)
    report.checks.update(sub.checks)
    _persist(report, cfg, out_dir)
    _raise_failures(rows)
    return report


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path | None = None):
    """Dispatch on ``cfg.mode``."""
    if cfg.mode == "rate":
        return run_rate_experiment(cfg, out_dir)
    if cfg.mode == "compare":
        return compare_iso_aniso(cfg, out_dir)
    return run_subset_experiment(cfg, out_dir)


# ---------------------------------------------------------------- outputs


def results_csv(rows: Sequence[CellResult], d: int) -> str:
    """CSV text with ``repr``-exact floats, rows in (n, replicate, arm) order."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mode", "n", "replicate", "lambda", *(f"gamma_{i + 1}" for i in range(d)), "risk", "risk_se", "seed"])
    for r in rows:
        gamma = list(r.gamma) if r.gamma else [float("nan")] * d
        w.writerow([r.mode, r.n, r.replicate, repr(r.lam), *map(repr, gamma), repr(r.risk), repr(r.risk_se), r.seed])
    return buf.getvalue()


def _slope_csv(reports: Sequence[RateReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mode", "log_n", "mean_log_risk"])
    for rep in reports:
        for s in rep.summaries:
            if s.count:
                w.writerow([rep.mode, repr(math.log(s.n)), repr(s.mean_log_risk)])
    return buf.getvalue()


def write_outputs(report, cfg: ExperimentConfig, out_dir: str | Path) -> Path:
    """Write ``results.csv``, ``report.json`` and ``slope.csv`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(results_csv(report.rows, cfg.d))
    payload = {"config": cfg.to_dict(), "report": report.to_dict()}
    (out / "report.json").write_text(json.dumps(payload, indent=2, default=_json_default) + "\n")
    if isinstance(report, RateReport):
        (out / "slope.csv").write_text(_slope_csv([report]))
    elif isinstance(report, SubsetReport):
        (out / "slope.csv").write_text(_slope_csv([report.full, report.subset]))
    else:
        (out / "slope.csv").write_text(_slope_csv([]))
    return out


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def _persist(report, cfg: ExperimentConfig, out_dir):
    target = out_dir if out_dir is not None else cfg.output
    if target is not None:
        write_outputs(report, cfg, target)


def rerun_row(cfg: ExperimentConfig, row: dict) -> tuple[float, float]:
    """Recompute ``(risk, risk_se)`` of one CSV row from its recorded lambda, gamma and seed."""
    n, seed = int(row["n"]), int(row["seed"])
    M = cfg.clip_bound if cfg.clip_bound is not None else default_clip_bound(make_target(cfg.target), cfg.d)
    gamma = tuple(float(row[f"gamma_{i + 1}"]) for i in range(cfg.d))
    with threadpool_limits(limits=1):
        data = _dataset(cfg, n, seed, M)
        model = fit(data, float(row["lambda"]), Bandwidths(gamma))
        return excess_risk(model, make_target(cfg.target), cfg.mc_samples, seed)
