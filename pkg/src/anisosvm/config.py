"""Experiment configuration: a dataclass mirrored by a strict JSON format."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .besov import SmoothnessProfile
from .errors import ConfigError, InvalidArgumentError
from .synth import FactorSpec, TargetSpec

__all__ = ["ExperimentConfig", "load_config", "target_from_dict"]

MODES = ("rate", "compare", "subset")
MODE_ALIASES = {"iso_vs_aniso": "compare"}
TUNE_MODES = ("none", "per_n", "pilot")


def target_from_dict(raw: dict) -> TargetSpec:
    if not isinstance(raw, dict):
        raise ConfigError("target must be an object")
    allowed = {"factors", "combine", "amplitude", "declared_alpha"}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown target keys: {sorted(unknown)}")
    try:
        factors = []
        for f in raw["factors"]:
            if isinstance(f, str):
                f = {"kind": f}
            extra = set(f) - {"kind", "param"}
            if extra:
                raise ConfigError(f"unknown factor keys: {sorted(extra)}")
            factors.append(FactorSpec(f["kind"], f.get("param")))
        alpha = raw.get("declared_alpha")
        return TargetSpec(
            tuple(factors),
            combine=raw.get("combine", "product"),
            amplitude=float(raw.get("amplitude", 1.0)),
            declared_alpha=None if alpha is None else tuple(alpha),
        )
    except KeyError as exc:
        raise ConfigError(f"target is missing {exc}") from exc
    except (InvalidArgumentError, TypeError) as exc:
        raise ConfigError(f"invalid target: {exc}") from exc


@dataclass
class ExperimentConfig:
    """One sweep over sample sizes and replicates.

    ``tune`` selects how the schedule constants are chosen: ``"none"`` uses
    ``c1``/``c2`` as given; ``"per_n"`` (the default) re-tunes them on a validation split of
    every (n, replicate) dataset; ``"pilot"`` tunes them once per replicate on
    an independent pilot sample of size ``pilot_n`` and keeps them fixed over
    the whole n-grid. Tuning searches a ``tune_grid_size`` x
    ``tune_grid_size`` log-grid of multipliers spanning a factor
    ``tune_span`` around ``(c1, c2)``.
    """

    target: TargetSpec
    mode: str = "rate"
    n_grid: tuple[int, ...] = (64, 128, 256, 512)
    replicates: int = 3
    c1: float = 1.0
    c2: tuple[float, ...] | float = 1.0
    tune: str = "per_n"
    pilot_n: int | None = None
    validation_fraction: float = 0.2
    tune_grid_size: int = 5
    tune_span: float = 10.0
    mc_samples: int = 20000
    seed: int = 0
    noise_sd: float = 0.1
    noise: str = "truncated-gaussian"
    clip_bound: float | None = None
    active_subset: tuple[int, ...] | None = None
    slope_window: tuple[float, float] | None = None
    min_slope_gain: float = 0.05
    workers: int = 1
    output: str | None = None

    def __post_init__(self):
        self.mode = MODE_ALIASES.get(self.mode, self.mode)
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.tune not in TUNE_MODES:
            raise ConfigError(f"tune must be one of {TUNE_MODES}, got {self.tune!r}")
        grid = tuple(int(n) for n in self.n_grid)
        if len(grid) < 1 or min(grid) < 2:
            raise ConfigError("n_grid entries must be >= 2")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("n_grid must be strictly increasing")
        if self.mode != "compare" and len(grid) < 2:
            raise ConfigError("slope fitting needs at least two sample sizes")
        self.n_grid = grid
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if not self.c1 > 0:
            raise ConfigError("c1 must be positive")
        c2 = np.broadcast_to(np.asarray(self.c2, dtype=float), (self.target.d,))
        if np.any(c2 <= 0):
            raise ConfigError("c2 entries must be positive")
        self.c2 = tuple(float(v) for v in c2)
        if not 0 < self.validation_fraction < 1:
            raise ConfigError("validation_fraction must lie in (0, 1)")
        if self.tune_grid_size < 1 or not self.tune_span >= 1:
            raise ConfigError("tune grid needs size >= 1 and span >= 1")
        if self.mc_samples < 1 or self.workers < 1:
            raise ConfigError("mc_samples and workers must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        self.seed = int(self.seed)
        if self.pilot_n is None:
            self.pilot_n = grid[len(grid) // 2]
        if self.active_subset is not None:
            self.active_subset = tuple(int(i) for i in self.active_subset)
        if self.mode == "subset":
            I = self.subset_indices
            if not set(self.target.active_dims) <= set(I) or max(I) >= self.d:
                raise ConfigError("active_subset must contain every active coordinate of the target")
        if self.slope_window is not None:
            lo, hi = (float(v) for v in self.slope_window)
            if not lo < hi:
                raise ConfigError("slope_window must be [low, high] with low < high")
            self.slope_window = (lo, hi)

    @property
    def d(self) -> int:
        return self.target.d

    @property
    def subset_indices(self) -> tuple[int, ...]:
        if self.active_subset is not None:
            return self.active_subset
        return self.target.active_dims

    @property
    def profile(self) -> SmoothnessProfile:
        return SmoothnessProfile(self.target.declared_alpha)

    @property
    def subset_profile(self) -> SmoothnessProfile:
        return SmoothnessProfile(self.target.declared_alpha, self.subset_indices)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.name == "target":
                v = v.to_dict()
            elif isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "target" not in raw:
            raise ConfigError("config needs a target")
        kwargs = dict(raw)
        kwargs["target"] = target_from_dict(raw["target"])
        for key in ("n_grid", "active_subset", "slope_window"):
            if kwargs.get(key) is not None:
                kwargs[key] = tuple(kwargs[key])
        try:
            return cls(**kwargs)
        except (TypeError, InvalidArgumentError) as exc:
            raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(raw)
