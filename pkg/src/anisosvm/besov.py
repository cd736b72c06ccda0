"""Finite differences, directional moduli of smoothness and smoothness bookkeeping.

The directional modulus of ``f`` in coordinate ``i`` is

    omega_r(f_i, t) = sup_x sup_{0 < |h| <= t} || Delta_h^r f_i(., x) ||,

where ``f_i`` freezes all coordinates but ``i`` at ``x`` and the r-th
difference vanishes wherever ``y + r h`` leaves the domain. Suprema over
anchors ``x`` and shifts ``h`` are approximated on deterministic grids over a
bounded box.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from .errors import DegenerateFitError, InvalidArgumentError

__all__ = [
    "SmoothnessProfile",
    "ModulusQuery",
    "forward_difference",
    "modulus_of_smoothness",
    "modulus_curve",
    "effective_smoothness",
    "effective_smoothness_subset",
    "anisotropy_vector",
    "default_order",
    "estimate_smoothness_exponent",
]

Box = Sequence[tuple[float, float]]

# moduli below this are numerical zeros and are dropped from log-log fits
_ZERO_MODULUS = 1e-12


def effective_smoothness(alpha) -> float:
    """Harmonic mean ``((1/d) sum 1/alpha_i)^{-1}``."""
    a = np.asarray(alpha, dtype=float).reshape(-1)
    if a.size == 0 or np.any(a <= 0):
        raise InvalidArgumentError(f"smoothness entries must be positive, got {a}")
    return float(a.size / np.sum(1.0 / a))


def effective_smoothness_subset(alpha, I, d: int | None = None) -> float:
    """``((1/d) sum_{i in I} 1/alpha_i)^{-1}``; note the divisor is the full ``d``.

    ``I`` holds 0-based coordinate indices.
    """
    a = np.asarray(alpha, dtype=float).reshape(-1)
    d = a.size if d is None else int(d)
    idx = sorted(set(int(i) for i in I))
    if not idx:
        raise InvalidArgumentError("active subset must be nonempty")
    if idx[0] < 0 or idx[-1] >= d or idx[-1] >= a.size:
        raise InvalidArgumentError(f"subset {idx} out of range for d={d}")
    sub = a[idx]
    if np.any(sub <= 0):
        raise InvalidArgumentError("smoothness entries must be positive")
    return float(d / np.sum(1.0 / sub))


def anisotropy_vector(alpha) -> np.ndarray:
    """``a_i = alpha0 / alpha_i``."""
    a = np.asarray(alpha, dtype=float)
    return effective_smoothness(a) / a


def default_order(alpha: float) -> int:
    """Difference order ``floor(alpha) + 1``."""
    return int(np.floor(alpha)) + 1


@dataclass(frozen=True)
class SmoothnessProfile:
    """Per-dimension smoothness, optionally with an active coordinate subset (0-based)."""

    alpha: tuple[float, ...]
    active_subset: tuple[int, ...] | None = None

    def __post_init__(self):
        a = tuple(float(v) for v in np.atleast_1d(self.alpha))
        if not a or min(a) <= 0:
            raise InvalidArgumentError(f"smoothness entries must be positive, got {a}")
        object.__setattr__(self, "alpha", a)
        if self.active_subset is not None:
            I = tuple(sorted(set(int(i) for i in self.active_subset)))
            if not I or I[0] < 0 or I[-1] >= len(a):
                raise InvalidArgumentError(f"active subset {I} invalid for d={len(a)}")
            object.__setattr__(self, "active_subset", I)

    @property
    def d(self) -> int:
        return len(self.alpha)

    @property
    def active_indices(self) -> tuple[int, ...]:
        return self.active_subset if self.active_subset is not None else tuple(range(self.d))

    @property
    def alpha0(self) -> float:
        if self.active_subset is None:
            return effective_smoothness(self.alpha)
        return effective_smoothness_subset(self.alpha, self.active_subset, self.d)

    @property
    def log_power(self) -> int:
        """Power of ``log n`` in the rate: ``d + 1``, or ``|I| + 1`` for a subset."""
        return len(self.active_indices) + 1


@dataclass(frozen=True)
class ModulusQuery:
    """What to measure: direction, order ``r``, scale ``t`` and norm.

    ``norm`` is ``"sup"`` or a float ``p >= 1`` for the ``L_p`` norm.
    ``anchors`` bounds the number of frozen-coordinate points (ignored for
    d = 1), ``h_count`` the shifts per scale, ``points`` the evaluation grid
    (sup norm) or stratified sample count (``L_p``).
    """

    direction: int
    order: int
    scale: float
    norm: str | float = "sup"
    anchors: int = 256
    h_count: int = 64
    points: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.order < 1:
            raise InvalidArgumentError("difference order must be >= 1")
        if not self.scale > 0:
            raise InvalidArgumentError("scale t must be positive")
        if self.norm != "sup" and not float(self.norm) >= 1:
            raise InvalidArgumentError(f"norm must be 'sup' or p >= 1, got {self.norm!r}")
        if self.anchors < 1 or self.h_count < 1 or (self.points is not None and self.points < 2):
            raise InvalidArgumentError("sample budgets must be positive")

    @property
    def n_points(self) -> int:
        if self.points is not None:
            return self.points
        return 1024 if self.norm == "sup" else 4096


def forward_difference(f1d: Callable, x, h: float, r: int, domain: tuple[float, float] | None = None):
    """``sum_{j=0}^r C(r,j) (-1)^{r-j} f(x + j h)``, zero where ``x + s h`` leaves ``domain``."""
    if r < 1:
        raise InvalidArgumentError("r must be >= 1")
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for j in range(r + 1):
        total = total + comb(r, j) * (-1) ** (r - j) * np.asarray(f1d(x + j * h), dtype=float)
    if domain is not None:
        lo, hi = domain
        end = x + r * h
        inside = (np.minimum(x, end) >= lo) & (np.maximum(x, end) <= hi)
        total = np.where(inside, total, 0.0)
    return float(total) if total.ndim == 0 else total


def _anchor_points(domain: np.ndarray, direction: int, count: int, seed: int) -> np.ndarray:
    d = domain.shape[0]
    if d == 1:
        return np.zeros((1, 1))
    others = [k for k in range(d) if k != direction]
    sampler = qmc.Halton(d=len(others), scramble=True, seed=seed)
    u = sampler.random(count)
    pts = np.zeros((count, d))
    lo, hi = domain[others, 0], domain[others, 1]
    pts[:, others] = lo + u * (hi - lo)
    return pts


def _h_grid(t_values: np.ndarray, h_count: int) -> np.ndarray:
    grids = [t * np.arange(1, h_count + 1) / h_count for t in t_values]
    return np.unique(np.concatenate(grids))


def _difference_norms(f, query: ModulusQuery, domain: np.ndarray, hs: np.ndarray) -> np.ndarray:
    i = query.direction
    r = query.order
    lo, hi = domain[i]
    anchors = _anchor_points(domain, i, query.anchors, query.seed)
    m = query.n_points
    out = np.zeros(hs.shape[0])
    if query.norm == "sup":
        base = None
    else:
        p = float(query.norm)
        rng = np.random.default_rng(query.seed)
        # one jittered point per stratum of [lo, hi]
        base = lo + (np.arange(m) + rng.random(m)) * (hi - lo) / m
    for k, h in enumerate(hs):
        right = hi - r * h
        if right < lo:
            continue
        ys = np.linspace(lo, right, m) if base is None else base
        valid = ys <= right
        pts = np.repeat(anchors[:, None, :], ys.shape[0], axis=1)
        diff = np.zeros((anchors.shape[0], ys.shape[0]))
        for j in range(r + 1):
            pts[:, :, i] = ys[None, :] + j * h
            vals = np.asarray(f(pts.reshape(-1, pts.shape[2])), dtype=float)
            diff += comb(r, j) * (-1) ** (r - j) * vals.reshape(diff.shape)
        diff = np.where(valid[None, :], np.abs(diff), 0.0)
        if base is None:
            out[k] = diff.max()
        else:
            norms = ((hi - lo) * np.mean(diff**p, axis=1)) ** (1.0 / p)
            out[k] = norms.max()
    return out


def modulus_curve(f: Callable, query: ModulusQuery, domain: Box, t_values) -> np.ndarray:
    """Moduli at several scales sharing one shift grid.

    Shifts are the union of ``h_count`` equispaced points in ``(0, t]`` for
    every requested ``t``; ``omega(t)`` is the running maximum over shifts
    ``<= t``, so the returned curve is nondecreasing in ``t`` exactly.
    ``f`` maps an ``(m, d)`` array to ``m`` values.
    """
    dom = np.asarray(domain, dtype=float).reshape(-1, 2)
    if not 0 <= query.direction < dom.shape[0]:
        raise InvalidArgumentError(f"direction {query.direction} out of range")
    ts = np.asarray(t_values, dtype=float).reshape(-1)
    if np.any(ts <= 0):
        raise InvalidArgumentError("scales must be positive")
    hs = _h_grid(ts, query.h_count)
    running = np.maximum.accumulate(_difference_norms(f, query, dom, hs))
    pos = np.searchsorted(hs, ts, side="right") - 1
    return running[pos]


def modulus_of_smoothness(f: Callable, query: ModulusQuery, domain: Box) -> float:
    return float(modulus_curve(f, query, domain, [query.scale])[0])


def estimate_smoothness_exponent(
    f: Callable,
    direction: int,
    t_grid,
    r: int,
    domain: Box,
    norm: str | float = "sup",
    **query_kwargs,
) -> float:
    """Slope of ``log omega_r(f, t)`` against ``log t`` over ``t_grid``.

    For generalized-Lipschitz targets this estimates ``min(alpha_i, r)``.
    Scales where the modulus is numerically zero are dropped first.
    """
    ts = np.asarray(t_grid, dtype=float)
    if ts.size < 3:
        raise InvalidArgumentError("need at least three scales")
    q = ModulusQuery(direction=direction, order=r, scale=float(ts.max()), norm=norm, **query_kwargs)
    omega = modulus_curve(f, q, domain, ts)
    keep = omega >= _ZERO_MODULUS
    if keep.sum() < 2:
        raise DegenerateFitError("modulus vanishes at (almost) every scale")
    slope, _ = np.polyfit(np.log(ts[keep]), np.log(omega[keep]), 1)
    return float(slope)
