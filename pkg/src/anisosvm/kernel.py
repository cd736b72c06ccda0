"""Anisotropic Gaussian kernels, their Gram matrices and the RKHS machinery.

The kernel is

    k_gamma(x, x') = exp(-sum_j (x_j - x'_j)^2 / gamma_j^2),

a tensor product of one-dimensional Gaussian kernels. Its RKHS has the
orthonormal basis

    e_{j,n}(z) = sqrt(2^n / (gamma_j^{2n} n!)) z^n exp(-z^2 / gamma_j^2)

in every coordinate, which is what :func:`onb_eval` and
:func:`kernel_from_onb` evaluate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.spatial.distance import cdist
from scipy.special import gammaln

from .errors import InvalidArgumentError, NumericalFailureError

__all__ = [
    "Bandwidths",
    "KernelExpansion",
    "QuadratureSpec",
    "as_bandwidths",
    "eval_kernel",
    "eval_kernel_1d",
    "kernel_matrix",
    "gram_matrix",
    "onb_eval",
    "onb_eval_1d",
    "kernel_from_onb",
    "rkhs_norm_expansion",
    "rkhs_norm_integral_formula",
]

# quadratic forms above this (negative) value are treated as rounding noise
_NEG_QUAD_TOL = -1e-10


@dataclass(frozen=True)
class Bandwidths:
    """Per-dimension kernel widths ``gamma = (gamma_1, ..., gamma_d)``."""

    gamma: tuple[float, ...]

    def __post_init__(self):
        g = tuple(float(v) for v in np.atleast_1d(np.asarray(self.gamma, dtype=float)))
        if len(g) < 1:
            raise InvalidArgumentError("bandwidths need at least one dimension")
        if not all(np.isfinite(v) and v > 0 for v in g):
            raise InvalidArgumentError(f"bandwidths must be positive and finite, got {g}")
        object.__setattr__(self, "gamma", g)

    @property
    def d(self) -> int:
        return len(self.gamma)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.gamma, dtype=float)

    @property
    def shape_parameter(self) -> np.ndarray:
        """The inverse widths ``w = 1 / gamma``."""
        return 1.0 / self.array

    @classmethod
    def isotropic(cls, gamma: float, d: int) -> "Bandwidths":
        return cls((float(gamma),) * d)


def as_bandwidths(bw) -> Bandwidths:
    if isinstance(bw, Bandwidths):
        return bw
    return Bandwidths(tuple(np.atleast_1d(np.asarray(bw, dtype=float))))


@dataclass(frozen=True)
class KernelExpansion:
    """A function ``sum_j coefficients[j] * k_gamma(., centers[j])``."""

    centers: np.ndarray
    coefficients: np.ndarray
    bandwidths: Bandwidths

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        a = np.atleast_1d(np.asarray(self.coefficients, dtype=float))
        bw = as_bandwidths(self.bandwidths)
        if c.shape[0] != a.shape[0]:
            raise InvalidArgumentError(
                f"{c.shape[0]} centers but {a.shape[0]} coefficients"
            )
        if c.shape[1] != bw.d:
            raise InvalidArgumentError(
                f"centers have dimension {c.shape[1]}, bandwidths {bw.d}"
            )
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "coefficients", a)
        object.__setattr__(self, "bandwidths", bw)

    def __call__(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        vals = kernel_matrix(np.atleast_2d(x), self.centers, self.bandwidths) @ self.coefficients
        return float(vals[0]) if single else vals


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Hermite node counts, one per dimension (an int broadcasts)."""

    nodes: int | tuple[int, ...] = 64

    def per_dim(self, d: int) -> tuple[int, ...]:
        if isinstance(self.nodes, (int, np.integer)):
            counts = (int(self.nodes),) * d
        else:
            counts = tuple(int(v) for v in self.nodes)
        if len(counts) != d or min(counts) < 1:
            raise InvalidArgumentError(f"bad node counts {counts} for dimension {d}")
        return counts


def _points(x, d: int, name: str = "x") -> np.ndarray:
    arr = np.atleast_2d(np.asarray(x, dtype=float))
    if arr.shape[1] != d:
        raise InvalidArgumentError(f"{name} has dimension {arr.shape[1]}, expected {d}")
    return arr


def eval_kernel(x, x2, bw) -> float:
    """Kernel value for a single pair of points."""
    bw = as_bandwidths(bw)
    x = np.asarray(x, dtype=float).reshape(-1)
    x2 = np.asarray(x2, dtype=float).reshape(-1)
    if x.shape[0] != bw.d or x2.shape[0] != bw.d:
        raise InvalidArgumentError(
            f"points of dimension {x.shape[0]} and {x2.shape[0]} for d={bw.d} bandwidths"
        )
    w = bw.shape_parameter
    diff = x * w - x2 * w
    return float(np.exp(-np.dot(diff, diff)))


def eval_kernel_1d(x: float, x2: float, gamma: float) -> float:
    return float(np.exp(-((x - x2) / gamma) ** 2))


def kernel_matrix(X, Y, bw) -> np.ndarray:
    """Cross kernel matrix ``K[i, j] = k(X[i], Y[j])``."""
    bw = as_bandwidths(bw)
    w = bw.shape_parameter
    X = _points(X, bw.d, "X")
    Y = _points(Y, bw.d, "Y")
    return np.exp(-cdist(X * w, Y * w, "sqeuclidean"))


def gram_matrix(points, bw) -> np.ndarray:
    """Symmetric Gram matrix of ``points``; each entry is computed independently."""
    bw = as_bandwidths(bw)
    if np.asarray(points).size == 0:
        raise InvalidArgumentError("gram_matrix needs at least one point")
    P = _points(points, bw.d, "points")
    return kernel_matrix(P, P, bw)


def onb_eval_1d(n: int, gamma: float, z) -> np.ndarray:
    """``e_n(z)`` for one coordinate, with the coefficient formed in log space."""
    z = np.asarray(z, dtype=float)
    log_coef = 0.5 * (n * np.log(2.0) - 2 * n * np.log(gamma) - gammaln(n + 1))
    gauss = np.exp(-((z / gamma) ** 2))
    if n == 0:
        return np.exp(log_coef) * gauss
    with np.errstate(divide="ignore"):
        log_mag = log_coef + n * np.log(np.abs(z)) - (z / gamma) ** 2
    sign = np.sign(z) ** n
    return sign * np.exp(log_mag)


def onb_eval(idx: Sequence[int], bw, z) -> float:
    """Tensor-product basis function ``prod_j e_{j, idx[j]}(z_j)``."""
    bw = as_bandwidths(bw)
    idx = tuple(int(v) for v in idx)
    z = np.asarray(z, dtype=float).reshape(-1)
    if len(idx) != bw.d or z.shape[0] != bw.d:
        raise InvalidArgumentError("multi-index, point and bandwidths must share dimension")
    if min(idx) < 0:
        raise InvalidArgumentError(f"multi-index entries must be >= 0, got {idx}")
    out = 1.0
    for n, g, zj in zip(idx, bw.gamma, z):
        out *= float(onb_eval_1d(n, g, zj))
    return out


def kernel_from_onb(x, x2, bw, truncation: int) -> float:
    """Partial sum of ``sum_n e_n(x) e_n(x2)`` over multi-indices with entries below ``truncation``.

    The basis is a tensor product, so the d-dimensional sum factors into d
    one-dimensional sums.
    """
    if truncation < 1:
        raise InvalidArgumentError("truncation must be >= 1")
    bw = as_bandwidths(bw)
    x = _points(x, bw.d)[0]
    x2 = _points(x2, bw.d)[0]
    total = 1.0
    for j, g in enumerate(bw.gamma):
        s = 0.0
        for n in range(truncation):
            s += float(onb_eval_1d(n, g, x[j]) * onb_eval_1d(n, g, x2[j]))
        total *= s
    return total


def rkhs_norm_expansion(f: KernelExpansion) -> float:
    """Canonical RKHS norm ``sqrt(a^T K a)`` of a kernel expansion."""
    if f.coefficients.size == 0:
        raise InvalidArgumentError("empty expansion")
    K = gram_matrix(f.centers, f.bandwidths)
    q = float(f.coefficients @ K @ f.coefficients)
    if q < _NEG_QUAD_TOL:
        raise NumericalFailureError(f"quadratic form a^T K a = {q} is negative")
    return float(np.sqrt(max(q, 0.0)))


def rkhs_norm_integral_formula(
    f: Callable[[np.ndarray], np.ndarray],
    bw,
    quad: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Gaussian-weighted L2 norm

        (2/pi)^{d/2} (prod gamma_i)^{-1} (int |f(x)|^2 exp(-sum 4 x_i^2 / gamma_i^2) dx)^{1/2}

    by tensor Gauss-Hermite quadrature (``x_i = gamma_i z_i / 2`` turns the
    weight into ``exp(-|z|^2)``).

    This is a diagnostic: the value does not coincide with the RKHS norm of
    the basis :func:`onb_eval` (``e_0`` with ``gamma = 1`` gets ~0.6786).
    Use :func:`rkhs_norm_expansion` for the canonical norm.

    ``f`` must accept an ``(m, d)`` array and return ``m`` values.
    """
    bw = as_bandwidths(bw)
    d = bw.d
    if d > 4:
        raise InvalidArgumentError("the quadrature norm is limited to d <= 4")
    counts = quad.per_dim(d)
    rules = [hermgauss(m) for m in counts]
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    weights = np.ones_like(grids[0])
    for axis, (_, w) in enumerate(rules):
        shape = [1] * d
        shape[axis] = -1
        weights = weights * w.reshape(shape)
    Z = np.stack([g.ravel() for g in grids], axis=1)
    X = Z * (bw.array / 2.0)
    vals = np.asarray(f(X), dtype=float).reshape(-1)
    if not np.all(np.isfinite(vals)):
        raise NumericalFailureError("integrand produced non-finite samples")
    integral = float(np.prod(bw.array / 2.0)) * float(np.sum(weights.ravel() * vals**2))
    return float((2.0 / np.pi) ** (d / 2) / np.prod(bw.array) * np.sqrt(integral))
