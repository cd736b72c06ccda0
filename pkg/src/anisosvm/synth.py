"""Synthetic regression targets with declared directional smoothness.

Each coordinate carries one univariate factor, normalised to sup 1 on [0, 1]:

* ``sine``     -- ``sin(2 pi freq x)``; smoothness must be declared explicitly
* ``kink``     -- ``|x - c| / max(c, 1 - c)``; smoothness 1
* ``bspline``  -- cardinal B-spline of order ``k`` on ``[0, 1]``; smoothness ``k - 1``
* ``constant`` -- inactive coordinate

Factors are combined by product or sum and scaled by ``amplitude``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import BSpline
from scipy.stats import truncnorm

from .errors import InvalidArgumentError, NumericalFailureError
from .solver import Dataset, TrainedModel, clip, predict

__all__ = [
    "FactorSpec",
    "TargetSpec",
    "SamplingSpec",
    "Target",
    "make_target",
    "sample_dataset",
    "excess_risk",
    "excess_risk_difference",
    "default_clip_bound",
    "philox",
    "derive_seed",
]

_KINDS = ("sine", "kink", "bspline", "constant")


@dataclass(frozen=True)
class FactorSpec:
    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidArgumentError(f"unknown factor kind {self.kind!r}; expected one of {_KINDS}")
        if self.kind == "bspline":
            k = self.param if self.param is not None else 4
            if int(k) != k or k < 2:
                raise InvalidArgumentError("bspline order must be an integer >= 2")
            object.__setattr__(self, "param", int(k))
        elif self.kind == "kink":
            c = 0.5 if self.param is None else float(self.param)
            if not 0 < c < 1:
                raise InvalidArgumentError("kink center must lie in (0, 1)")
            object.__setattr__(self, "param", c)
        elif self.kind == "sine":
            object.__setattr__(self, "param", 1.0 if self.param is None else float(self.param))

    @property
    def natural_alpha(self) -> float | None:
        if self.kind == "kink":
            return 1.0
        if self.kind == "bspline":
            return float(self.param - 1)
        return None

    def to_dict(self) -> dict:
        return {"kind": self.kind, "param": self.param}


@dataclass(frozen=True)
class TargetSpec:
    """Per-coordinate factors, combination rule and declared smoothness.

    ``declared_alpha`` defaults to the factors' natural smoothness and must be
    given explicitly when a ``sine`` or ``constant`` factor is present.
    """

    factors: tuple[FactorSpec, ...]
    combine: str = "product"
    amplitude: float = 1.0
    declared_alpha: tuple[float, ...] | None = None

    def __post_init__(self):
        facs = tuple(f if isinstance(f, FactorSpec) else FactorSpec(**f) for f in self.factors)
        if not facs:
            raise InvalidArgumentError("target needs at least one factor")
        if self.combine not in ("product", "sum"):
            raise InvalidArgumentError(f"combine must be 'product' or 'sum', got {self.combine!r}")
        if all(f.kind == "constant" for f in facs):
            raise InvalidArgumentError("target needs at least one active coordinate")
        if self.declared_alpha is None:
            nat = [f.natural_alpha for f in facs]
            if any(a is None for a in nat):
                raise InvalidArgumentError("declared_alpha is required for sine or constant factors")
            alpha = tuple(nat)
        else:
            alpha = tuple(float(a) for a in self.declared_alpha)
            if len(alpha) != len(facs):
                raise InvalidArgumentError("declared_alpha must have one entry per coordinate")
            for f, a in zip(facs, alpha):
                if f.natural_alpha is not None and a != f.natural_alpha:
                    raise InvalidArgumentError(
                        f"declared smoothness {a} inconsistent with {f.kind} factor ({f.natural_alpha})"
                    )
        if min(alpha) <= 0:
            raise InvalidArgumentError("declared smoothness must be positive")
        if min(alpha) < 1:
            warnings.warn("declared smoothness below 1 lies outside the range assumed by the rate analysis")
        object.__setattr__(self, "factors", facs)
        object.__setattr__(self, "declared_alpha", alpha)

    @property
    def d(self) -> int:
        return len(self.factors)

    @property
    def active_dims(self) -> tuple[int, ...]:
        return tuple(i for i, f in enumerate(self.factors) if f.kind != "constant")

    @property
    def sup_bound(self) -> float:
        """Exact ``sup |f*|`` over ``[0, 1]^d``."""
        k = len(self.active_dims) if self.combine == "sum" else 1
        return abs(self.amplitude) * k

    def to_dict(self) -> dict:
        return {
            "factors": [f.to_dict() for f in self.factors],
            "combine": self.combine,
            "amplitude": self.amplitude,
            "declared_alpha": list(self.declared_alpha),
        }


def _bspline_factor(order: int) -> Callable[[np.ndarray], np.ndarray]:
    knots = np.linspace(0.0, 1.0, order + 1)
    basis = BSpline.basis_element(knots, extrapolate=False)
    peak = float(basis(0.5))

    def factor(x):
        return np.nan_to_num(basis(x), nan=0.0) / peak

    return factor


def _factor_fn(spec: FactorSpec) -> Callable[[np.ndarray], np.ndarray]:
    if spec.kind == "sine":
        freq = spec.param
        return lambda x: np.sin(2 * np.pi * freq * x)
    if spec.kind == "kink":
        c = spec.param
        scale = max(c, 1 - c)
        return lambda x: np.abs(x - c) / scale
    if spec.kind == "bspline":
        return _bspline_factor(spec.param)
    return lambda x: np.ones_like(x)


class Target:
    """Deterministic callable ``f*`` built from a :class:`TargetSpec`.

    Picklable, so it can be shipped to worker processes.
    """

    def __init__(self, spec: TargetSpec):
        self.spec = spec
        self._factors = [(_factor_fn(spec.factors[i]), i) for i in spec.active_dims]

    def __getstate__(self):
        return {"spec": self.spec}

    def __setstate__(self, state):
        self.__init__(state["spec"])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        X = np.atleast_2d(x)
        if X.shape[1] != self.spec.d:
            raise InvalidArgumentError(f"point dimension {X.shape[1]} does not match d={self.spec.d}")
        if self.spec.combine == "product":
            out = np.ones(X.shape[0])
            for fn, i in self._factors:
                out = out * fn(X[:, i])
        else:
            out = np.zeros(X.shape[0])
            for fn, i in self._factors:
                out = out + fn(X[:, i])
        out = self.spec.amplitude * out
        return float(out[0]) if x.ndim == 1 else out

    def factor(self, i: int) -> Callable[[np.ndarray], np.ndarray]:
        """Univariate factor of coordinate ``i``."""
        return _factor_fn(self.spec.factors[i])


def make_target(spec: TargetSpec) -> Target:
    return Target(spec)


def philox(seed: int, *key: int) -> np.random.Generator:
    """Counter-based generator for the stream ``(seed, *key)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, key)])))


def derive_seed(seed: int, *key: int) -> int:
    """A 64-bit seed derived from ``(seed, *key)``."""
    state = np.random.SeedSequence([int(seed), *map(int, key)]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def default_clip_bound(f: Callable, d: int, grid_points: int = 100_000, seed: int = 0) -> float:
    """``1.5 * max |f|`` over a quasi-random point set in ``[0, 1]^d``."""
    if d == 1:
        X = np.linspace(0.0, 1.0, grid_points)[:, None]
    else:
        X = philox(seed, 0xC11B).random((grid_points, d))
    return 1.5 * float(np.max(np.abs(f(X))))


@dataclass(frozen=True)
class SamplingSpec:
    """Uniform design on ``[0, 1]^d`` with bounded additive noise.

    ``noise`` is ``"truncated-gaussian"`` (a centred Gaussian of scale
    ``noise_sd`` cut symmetrically at the largest width that keeps responses
    in ``[-M, M]``) or ``"uniform"`` (standard deviation ``noise_sd``).
    """

    n: int
    d: int
    noise_sd: float = 0.0
    seed: int = 0
    noise: str = "truncated-gaussian"

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise InvalidArgumentError("need n >= 1 and d >= 1")
        if self.noise_sd < 0:
            raise InvalidArgumentError("noise_sd must be nonnegative")
        if self.noise not in ("truncated-gaussian", "uniform"):
            raise InvalidArgumentError(f"unknown noise kind {self.noise!r}")


def _noise(rng: np.random.Generator, samp: SamplingSpec, half_width: float) -> np.ndarray:
    if samp.noise_sd == 0:
        return np.zeros(samp.n)
    if half_width <= 0:
        raise InvalidArgumentError("no room for noise: sup|f*| already reaches M")
    if samp.noise == "uniform":
        w = samp.noise_sd * math.sqrt(3.0)
        if w > half_width:
            raise InvalidArgumentError(f"uniform noise of width {w} does not fit in [-M, M]")
        return rng.uniform(-w, w, size=samp.n)
    b = half_width / samp.noise_sd
    return truncnorm.rvs(-b, b, scale=samp.noise_sd, size=samp.n, random_state=rng)


def sample_dataset(f: Callable, samp: SamplingSpec, M: float, f_sup: float | None = None) -> Dataset:
    """Draw ``n`` uniform inputs and noisy responses, bitwise reproducible from ``samp.seed``.

    ``f_sup`` is a bound on ``sup |f*|`` (taken from the target when it is a
    :class:`Target`); the noise is truncated to ``M - f_sup``.
    """
    if f_sup is None:
        f_sup = f.spec.sup_bound if isinstance(f, Target) else M / 1.5
    if f_sup > M:
        raise InvalidArgumentError(f"sup|f*| = {f_sup} exceeds M = {M}")
    rng = philox(samp.seed)
    X = rng.random((samp.n, samp.d))
    y = np.asarray(f(X), dtype=float) + _noise(rng, samp, M - f_sup)
    if np.any(np.abs(y) > M):
        raise NumericalFailureError("a response escaped [-M, M] after truncation")
    return Dataset(X, y, M)


def _mc_points(d: int, count: int, seed: int) -> np.ndarray:
    if count < 1:
        raise InvalidArgumentError("Monte-Carlo sample count must be >= 1")
    return philox(seed, 0x5EED).random((count, d))


def _mean_and_se(values: np.ndarray) -> tuple[float, float]:
    m = values.shape[0]
    mean = math.fsum(values) / m
    if m < 2:
        return mean, float("nan")
    var = math.fsum((values - mean) ** 2) / (m - 1)
    return mean, math.sqrt(var / m)


def excess_risk(model: TrainedModel, f: Callable, count: int, seed: int, clipped: bool = True) -> tuple[float, float]:
    """Monte-Carlo ``||f_hat - f*||^2_{L2(U[0,1]^d)}`` and its standard error.

    The same ``seed`` yields the same evaluation points, so clipped and raw
    estimates use common random numbers.
    """
    X = _mc_points(model.bandwidths.d, count, seed)
    pred = predict(model, X)
    if clipped:
        pred = clip(pred, model.clip_bound)
    return _mean_and_se((pred - np.asarray(f(X), dtype=float)) ** 2)


def excess_risk_difference(
    model_a: TrainedModel, model_b: TrainedModel, f: Callable, count: int, seed: int
) -> tuple[float, float, float, float, float, float]:
    """Paired clipped risks of two models on common points.

    Returns ``(risk_a, se_a, risk_b, se_b, diff, se_diff)`` with ``diff = risk_a - risk_b``.
    """
    X = _mc_points(model_a.bandwidths.d, count, seed)
    fx = np.asarray(f(X), dtype=float)
    ea = (clip(predict(model_a, X), model_a.clip_bound) - fx) ** 2
    eb = (clip(predict(model_b, X), model_b.clip_bound) - fx) ** 2
    return (*_mean_and_se(ea), *_mean_and_se(eb), *_mean_and_se(ea - eb))
