"""The convolution smoother used to bound the approximation error.

In every coordinate the smoother is the signed Gaussian mixture

    K_i(x) = sum_{j=1}^{r_i} C(r_i, j) (-1)^{1-j} N(x; 0, (j gamma_i / 2)^2),

whose weights sum to one, and ``K = prod_i K_i``. Convolutions ``K * f`` are
evaluated exactly per mixture component with Gauss-Hermite rules.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.hermite import hermgauss

from .besov import ModulusQuery, modulus_of_smoothness
from .errors import InvalidArgumentError, NumericalFailureError
from .kernel import Bandwidths, QuadratureSpec, as_bandwidths

__all__ = [
    "SmootherSpec",
    "k_i_eval",
    "K_product_eval",
    "mixture_components",
    "convolve",
    "sup_bound_constant",
    "rkhs_bound_convolution",
    "c_r_q_constant",
    "error_estimation_rhs",
]


@dataclass(frozen=True)
class SmootherSpec:
    r: tuple[int, ...]
    bandwidths: Bandwidths

    def __post_init__(self):
        r = tuple(int(v) for v in np.atleast_1d(self.r))
        bw = as_bandwidths(self.bandwidths)
        if min(r) < 1:
            raise InvalidArgumentError("difference orders must be >= 1")
        if len(r) != bw.d:
            raise InvalidArgumentError("orders and bandwidths disagree on dimension")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "bandwidths", bw)

    @property
    def d(self) -> int:
        return len(self.r)

    @classmethod
    def from_smoothness(cls, alpha, bw) -> "SmootherSpec":
        """Orders ``floor(alpha_i) + 1``."""
        return cls(tuple(int(math.floor(a)) + 1 for a in np.atleast_1d(alpha)), bw)


def mixture_components(r_i: int, gamma_i: float):
    """``(weights, standard deviations)`` of the one-dimensional mixture ``K_i``."""
    j = np.arange(1, r_i + 1)
    weights = np.array([math.comb(r_i, int(k)) * (-1.0) ** (1 - int(k)) for k in j])
    return weights, j * gamma_i / 2.0


def k_i_eval(x, gamma_i: float, r_i: int):
    """``sqrt(2/pi) sum_j C(r,j) (-1)^{1-j} / (j gamma) exp(-2 x^2 / (j gamma)^2)``."""
    if not gamma_i > 0:
        raise InvalidArgumentError("gamma_i must be positive")
    if r_i < 1:
        raise InvalidArgumentError("r_i must be >= 1")
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for j in range(1, r_i + 1):
        jg = j * gamma_i
        total = total + math.comb(r_i, j) * (-1.0) ** (1 - j) / jg * np.exp(-2.0 * x**2 / jg**2)
    total = math.sqrt(2.0 / math.pi) * total
    return float(total) if total.ndim == 0 else total


def K_product_eval(x, spec: SmootherSpec):
    x = np.asarray(x, dtype=float)
    X = np.atleast_2d(x)
    if X.shape[1] != spec.d:
        raise InvalidArgumentError(f"point dimension {X.shape[1]} does not match d={spec.d}")
    out = np.ones(X.shape[0])
    for i, (r, g) in enumerate(zip(spec.r, spec.bandwidths.gamma)):
        out *= k_i_eval(X[:, i], g, r)
    return float(out[0]) if x.ndim == 1 else out


def _hermite(n: int):
    z, w = hermgauss(n)
    return z * math.sqrt(2.0), w / math.sqrt(math.pi)


def convolve(
    f: Callable[[np.ndarray], np.ndarray],
    spec: SmootherSpec,
    quad: QuadratureSpec = QuadratureSpec(40),
    domain: Sequence[tuple[float, float]] | None = None,
) -> Callable[[np.ndarray], np.ndarray]:
    """Return ``f0 = K * f`` as a callable on ``(m, d)`` (or single ``(d,)``) inputs.

    Each product component ``prod_i N(0, (j_i gamma_i / 2)^2)`` is integrated
    with a tensor Gauss-Hermite rule; components are combined with the signed
    weights. When ``domain`` is given, ``f`` is extended by zero outside it.
    """
    d = spec.d
    if d > 3:
        raise InvalidArgumentError("convolution by tensor quadrature is limited to d <= 3")
    counts = quad.per_dim(d)
    rules = [_hermite(m) for m in counts]
    comps = [mixture_components(r, g) for r, g in zip(spec.r, spec.bandwidths.gamma)]
    dom = None if domain is None else np.asarray(domain, dtype=float).reshape(-1, 2)

    nodes = np.stack([g.ravel() for g in np.meshgrid(*[z for z, _ in rules], indexing="ij")], axis=1)
    node_w = np.ones(nodes.shape[0])
    for axis, w in enumerate(np.meshgrid(*[w for _, w in rules], indexing="ij")):
        node_w = node_w * w.ravel()

    terms = []
    for js in itertools.product(*[range(len(c[0])) for c in comps]):
        weight = float(np.prod([comps[i][0][j] for i, j in enumerate(js)]))
        sd = np.array([comps[i][1][j] for i, j in enumerate(js)])
        terms.append((weight, nodes * sd))

    def f0(x):
        x = np.asarray(x, dtype=float)
        X = np.atleast_2d(x)
        if X.shape[1] != d:
            raise InvalidArgumentError(f"point dimension {X.shape[1]} does not match d={d}")
        out = np.zeros(X.shape[0])
        for weight, shifts in terms:
            pts = X[:, None, :] - shifts[None, :, :]
            vals = np.asarray(f(pts.reshape(-1, d)), dtype=float).reshape(X.shape[0], -1)
            if not np.all(np.isfinite(vals)):
                raise NumericalFailureError("f produced non-finite samples")
            if dom is not None:
                inside = np.all((pts >= dom[:, 0]) & (pts <= dom[:, 1]), axis=2)
                vals = np.where(inside, vals, 0.0)
            out += weight * (vals @ node_w)
        return float(out[0]) if x.ndim == 1 else out

    return f0


def sup_bound_constant(r) -> float:
    """``prod_i (2^{r_i} - 1)``, which bounds ``int |K|``."""
    r = [int(v) for v in np.atleast_1d(r)]
    if min(r) < 1:
        raise InvalidArgumentError("orders must be >= 1")
    return float(np.prod([2**v - 1 for v in r]))


def rkhs_bound_convolution(f_l2_norm: float, spec: SmootherSpec) -> float:
    """``pi^{-d/4} prod(2^{r_i} - 1) ||f||_{L2} prod gamma_i^{-1/2}``."""
    if f_l2_norm < 0:
        raise InvalidArgumentError("norm must be nonnegative")
    g = spec.bandwidths.array
    return float(math.pi ** (-spec.d / 4) * sup_bound_constant(spec.r) * f_l2_norm * np.prod(g ** -0.5))


def c_r_q_constant(r_i: int, q: float) -> float:
    """``sum_{j=0}^{m} C(m, j) 2^{(j-1)/2} (prod_{k=1}^j (k - 1/2))^{1/2}`` with ``m = ceil(r q)``."""
    if r_i < 1 or q < 1:
        raise InvalidArgumentError("need r_i >= 1 and q >= 1")
    m = math.ceil(r_i * q)
    total = 0.0
    prod = 1.0
    for j in range(m + 1):
        if j > 0:
            prod *= j - 0.5
        total += math.comb(m, j) * 2 ** ((j - 1) / 2) * math.sqrt(prod)
    return total


def error_estimation_rhs(
    f: Callable,
    spec: SmootherSpec,
    q: float,
    domain: Sequence[tuple[float, float]],
    density_norms=None,
    **query_kwargs,
) -> float:
    """``sum_i c_{r_i,q} ||g_i|| omega_{r_i, L_q}(f_i, gamma_i / 2)^q`` for bounded marginal densities.

    With densities in ``L_inf`` the conjugate exponent is ``s = 1``, so the
    moduli are taken in ``L_q``. ``c_{r_i,q} = c'_{r_i,q} prod_k (2^{r_k} - 1)^q``.
    """
    d = spec.d
    norms = np.ones(d) if density_norms is None else np.asarray(density_norms, dtype=float)
    scale = sup_bound_constant(spec.r) ** q
    total = 0.0
    for i in range(d):
        query = ModulusQuery(
            direction=i,
            order=spec.r[i],
            scale=spec.bandwidths.gamma[i] / 2.0,
            norm=float(q),
            **query_kwargs,
        )
        omega = modulus_of_smoothness(f, query, domain)
        total += c_r_q_constant(spec.r[i], q) * scale * norms[i] * omega**q
    return total
