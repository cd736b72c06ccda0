"""Closed-form quantities from the learning-rate analysis.

Everything here is a plain calculator: schedules for ``(lambda_n, gamma_n)``,
rate exponents, the entropy-number bound, the ``K(p)`` constant of the oracle
inequality and its right-hand side, the approximation-error bound, and the
bandwidths that minimise the combined bound ``g(gamma)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .besov import SmoothnessProfile, effective_smoothness
from .errors import InvalidArgumentError, NumericalFailureError
from .kernel import Bandwidths, as_bandwidths

__all__ = [
    "RateSchedule",
    "OracleConstants",
    "rate_exponent",
    "build_schedule",
    "schedule",
    "default_p",
    "entropy_bound",
    "entropy_coefficient",
    "Kp_constant",
    "KP_CAP",
    "oracle_rhs",
    "approximation_error_bound",
    "bandwidth_objective",
    "optimal_bandwidths",
]

KP_CAP = 3e8 * math.e**2
"""Upper bound on ``K(p) / M^2`` for ``p`` in ``(0, 1/2]``."""


def rate_exponent(alpha0: float, d: int) -> float:
    """Exponent ``2 alpha0 / (2 alpha0 + d)`` of ``n`` in the excess-risk rate."""
    if not alpha0 > 0 or d < 1:
        raise InvalidArgumentError("need alpha0 > 0 and d >= 1")
    return 2.0 * alpha0 / (2.0 * alpha0 + d)


@dataclass(frozen=True)
class RateSchedule:
    """``lambda_n = c1 / n`` and ``gamma_{i,n} = c2_i n^{exponents_gamma[i]}``.

    Inactive coordinates of a subset profile carry a ``None`` exponent and a
    bandwidth pinned to 1.
    """

    c1: float
    c2: tuple[float, ...]
    alpha0: float
    exponents_gamma: tuple[float | None, ...]
    exponent_lambda: float = -1.0

    @property
    def d(self) -> int:
        return len(self.exponents_gamma)

    def at(self, n: int, c1_scale: float = 1.0, c2_scale: float = 1.0):
        """Return ``(lambda_n, bandwidths, clamped)`` with widths clamped into ``(0, 1]``."""
        if n < 1:
            raise InvalidArgumentError("n must be >= 1")
        lam = self.c1 * c1_scale * float(n) ** self.exponent_lambda
        raw = []
        for c, e in zip(self.c2, self.exponents_gamma):
            raw.append(1.0 if e is None else c * c2_scale * float(n) ** e)
        clamped = any(g > 1.0 for g in raw)
        gamma = tuple(min(g, 1.0) for g in raw)
        return lam, Bandwidths(gamma), clamped


def build_schedule(profile: SmoothnessProfile, c1: float = 1.0, c2=1.0) -> RateSchedule:
    """Schedule for ``profile``; a profile with an active subset uses ``alpha0^I``."""
    d = profile.d
    c2 = tuple(float(v) for v in np.broadcast_to(np.asarray(c2, dtype=float), (d,)))
    if not c1 > 0 or min(c2) <= 0:
        raise InvalidArgumentError("schedule constants must be positive")
    a0 = profile.alpha0
    active = profile.active_indices
    exps = tuple(
        -a0 / (a * (2 * a0 + d)) if i in active else None
        for i, a in enumerate(profile.alpha)
    )
    return RateSchedule(float(c1), c2, a0, exps)


def schedule(n: int, profile: SmoothnessProfile, d: int | None = None, c1: float = 1.0, c2=1.0):
    """``(lambda_n, gamma_n, clamped)`` for sample size ``n``."""
    if d is not None and d != profile.d:
        raise InvalidArgumentError(f"profile has dimension {profile.d}, not {d}")
    return build_schedule(profile, c1, c2).at(n)


def default_p(n: int) -> float:
    """``p = 1 / log n`` clamped into ``(0, 1/2]``."""
    if n <= math.e**2:
        return 0.5
    return min(1.0 / math.log(n), 0.5)


def _check_p(p: float):
    if not 0 < p < 1:
        raise InvalidArgumentError(f"p must lie in (0, 1), got {p}")


def entropy_bound(i: int, p: float, bw, K: float = 1.0, d: int | None = None) -> float:
    """Bound on the i-th entropy number of ``id: H_gamma -> l_inf(X)``.

        (3K)^{1/p} ((d+1)/(e p))^{(d+1)/p} (prod gamma)^{-1/p} i^{-1/p}

    ``K`` is the (unspecified, dimension-dependent) covering constant.
    """
    _check_p(p)
    if i < 1:
        raise InvalidArgumentError("i must be >= 1")
    bw = as_bandwidths(bw)
    d = bw.d if d is None else d
    log_val = (
        math.log(3 * K) / p
        + (d + 1) / p * math.log((d + 1) / (math.e * p))
        - math.log(float(np.prod(bw.array))) / p
        - math.log(i) / p
    )
    return math.exp(log_val)


def entropy_coefficient(p: float, bw, K: float = 1.0, d: int | None = None, form: str = "rate") -> float:
    """The coefficient ``a`` fed to the oracle inequality.

    ``form="rate"`` uses exponents ``1/(2p)`` (the choice made when
    deriving learning rates); ``form="entropy"`` uses ``1/p`` so that ``a``
    equals :func:`entropy_bound` at ``i = 1``.
    """
    _check_p(p)
    bw = as_bandwidths(bw)
    d = bw.d if d is None else d
    if form == "rate":
        e = 1.0 / (2 * p)
    elif form == "entropy":
        e = 1.0 / p
    else:
        raise InvalidArgumentError(f"unknown form {form!r}")
    return (3 * K) ** e * ((d + 1) / (math.e * p)) ** ((d + 1) * e) * float(np.prod(bw.array)) ** (-e)


def _C_p(p: float) -> float:
    return (math.sqrt(2) - 1) / (math.sqrt(2) - 2 ** ((2 * p - 1) / (2 * p))) * (1 - p) / p


def Kp_constant(p: float, M: float = 1.0) -> float:
    """``K(p) = max{43200 4^p M^2 C1(p)^2, 360 480^p M^2 C2(p)^{1+p}, 8 M^2}``."""
    _check_p(p)
    if not M > 0:
        raise InvalidArgumentError("M must be positive")
    cpp = _C_p(p) ** p
    C1 = 2 * math.sqrt(math.log(256)) * cpp / ((math.sqrt(2) - 1) * (1 - p) * 2 ** (p / 2))
    C2 = (8 * math.sqrt(math.log(16)) * cpp / ((math.sqrt(2) - 1) * (1 - p) * 4**p)) ** (2 / (1 + p))
    return max(
        43200 * 2 ** (2 * p) * M**2 * C1**2,
        360 * 480**p * M**2 * C2 ** (1 + p),
        8 * M**2,
    )


@dataclass(frozen=True)
class OracleConstants:
    B0: float
    M: float
    p: float
    rho: float
    a: float

    def __post_init__(self):
        if not self.M > 0:
            raise InvalidArgumentError("M must be positive")
        if self.B0 < 4 * self.M**2:
            raise InvalidArgumentError("B0 must be at least 4 M^2")
        _check_p(self.p)
        if self.rho < 1:
            raise InvalidArgumentError("rho must be >= 1")
        if not self.a > 0:
            raise InvalidArgumentError("a must be positive")


def oracle_rhs(approx_term: float, constants: OracleConstants, lam: float, n: int) -> float:
    """Right-hand side of the oracle inequality for the clipped LS-SVM."""
    if not lam > 0 or n < 1:
        raise InvalidArgumentError("need lambda > 0 and n >= 1")
    c = constants
    stochastic = Kp_constant(c.p, c.M) * c.a ** (2 * c.p) / (lam**c.p * n)
    confidence = (3456 * c.M**2 + 15 * c.B0) * (1 + math.log(3)) * c.rho / n
    return 9 * approx_term + stochastic + confidence


def approximation_error_bound(lam: float, bw, profile, C1: float = 1.0, Cs: float = 1.0) -> float:
    """``C1 lam prod(gamma)^{-1} + Cs sum gamma_i^{2 alpha_i}``."""
    bw = as_bandwidths(bw)
    alpha = np.asarray(profile.alpha if isinstance(profile, SmoothnessProfile) else profile, dtype=float)
    if alpha.shape[0] != bw.d:
        raise InvalidArgumentError("profile and bandwidths disagree on dimension")
    g = bw.array
    return float(C1 * lam / np.prod(g) + Cs * np.sum(g ** (2 * alpha)))


def bandwidth_objective(gamma, lam: float, n: int, p: float, alpha) -> float:
    """``g(gamma) = lam/prod(gamma) + sum gamma_i^{2 alpha_i} + 1/(prod(gamma) lam^p n)``."""
    g = np.asarray(gamma, dtype=float)
    a = np.asarray(alpha, dtype=float)
    prod = np.prod(g)
    return float(lam / prod + np.sum(g ** (2 * a)) + 1.0 / (prod * lam**p * n))


def optimal_bandwidths(lam: float, n: int, p: float, profile) -> Bandwidths:
    """Stationary point of :func:`bandwidth_objective`.

    Every stationarity equation reads ``2 a_j gamma_j^{2 a_j} = A / prod(gamma)``
    with ``A = lam + lam^{-p}/n``. Writing ``2 a_i gamma_i^{2 a_i} = gamma0^{2 alpha0}``
    turns the system into one monotone equation in ``gamma0``, solved by
    bracketing root search in ``log gamma0``.
    """
    if not (lam > 0 and n >= 1 and p > 0):
        raise InvalidArgumentError("need lambda > 0, n >= 1, p > 0")
    alpha = np.asarray(profile.alpha if isinstance(profile, SmoothnessProfile) else profile, dtype=float)
    if np.any(alpha <= 0):
        raise InvalidArgumentError("smoothness entries must be positive")
    a0 = effective_smoothness(alpha)
    A = lam + lam ** (-p) / n

    def widths(log_g0):
        return np.exp((2 * a0 * log_g0 - np.log(2 * alpha)) / (2 * alpha))

    def residual(log_g0):
        # log(gamma0^{2 alpha0}) - log(A / prod(gamma)), increasing in log_g0
        return 2 * a0 * log_g0 - (math.log(A) - float(np.sum(np.log(widths(log_g0)))))

    lo, hi = -50.0, 50.0
    try:
        log_g0 = brentq(residual, lo, hi, xtol=1e-12, rtol=4 * np.finfo(float).eps, maxiter=200)
    except ValueError as exc:
        raise NumericalFailureError(f"could not bracket the stationarity root: {exc}") from exc
    return Bandwidths(tuple(widths(log_g0)))
