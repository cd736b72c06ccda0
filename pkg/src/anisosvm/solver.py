"""Least-squares SVM (kernel ridge) regression in the anisotropic Gaussian RKHS.

By the representer theorem the minimiser of

    (1/n) sum_i (y_i - f(x_i))^2 + lambda ||f||_H^2

is ``f = sum_j alpha_j k(., x_j)`` with ``(K + lambda n I) alpha = y``.
Clipping to ``[-M, M]`` is applied only when predictions are scored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import InvalidArgumentError, NumericalFailureError
from .kernel import KernelExpansion, as_bandwidths, gram_matrix, kernel_matrix, rkhs_norm_expansion

__all__ = [
    "Dataset",
    "TrainedModel",
    "fit",
    "predict",
    "clip",
    "empirical_risk",
    "objective",
]


@dataclass(frozen=True)
class Dataset:
    inputs: np.ndarray
    responses: np.ndarray
    clip_bound: float

    def __post_init__(self):
        X = np.asarray(self.inputs, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.asarray(self.responses, dtype=float).reshape(-1)
        if X.shape[0] < 1:
            raise InvalidArgumentError("dataset must contain at least one sample")
        if X.shape[0] != y.shape[0]:
            raise InvalidArgumentError(f"{X.shape[0]} inputs but {y.shape[0]} responses")
        M = float(self.clip_bound)
        if not M > 0:
            raise InvalidArgumentError("clip bound M must be positive")
        if np.any(np.abs(y) > M):
            raise InvalidArgumentError(f"responses exceed the clip bound M={M}")
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "responses", y)
        object.__setattr__(self, "clip_bound", M)

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def d(self) -> int:
        return self.inputs.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.inputs[idx], self.responses[idx], self.clip_bound)


@dataclass(frozen=True)
class TrainedModel:
    expansion: KernelExpansion
    lam: float
    clip_bound: float

    def __post_init__(self):
        if not self.lam > 0:
            raise InvalidArgumentError("lambda must be positive")

    @property
    def coefficients(self) -> np.ndarray:
        return self.expansion.coefficients

    @property
    def bandwidths(self):
        return self.expansion.bandwidths


def fit(data: Dataset, lam: float, bw) -> TrainedModel:
    """Solve ``(K + lam n I) alpha = y`` by Cholesky factorisation.

    No jitter is added beyond ``lam n I``; a failed factorisation raises
    :class:`NumericalFailureError`.
    """
    if not lam > 0:
        raise InvalidArgumentError(f"lambda must be positive, got {lam}")
    bw = as_bandwidths(bw)
    K = gram_matrix(data.inputs, bw)
    n = data.n
    K[np.diag_indices(n)] += lam * n
    try:
        factor = cho_factor(K, lower=True, check_finite=True)
        alpha = cho_solve(factor, data.responses, check_finite=False)
    except (LinAlgError, ValueError) as exc:
        raise NumericalFailureError(f"Cholesky solve failed (n={n}, lambda={lam}): {exc}") from exc
    if not np.all(np.isfinite(alpha)):
        raise NumericalFailureError("non-finite dual coefficients")
    return TrainedModel(KernelExpansion(data.inputs, alpha, bw), float(lam), data.clip_bound)


def predict(model: TrainedModel, x, chunk: int = 4096):
    """Unclipped prediction; a 1-d ``x`` is one point, a 2-d ``x`` is a batch."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.shape[1] != model.bandwidths.d:
        raise InvalidArgumentError(
            f"point dimension {X.shape[1]} does not match model dimension {model.bandwidths.d}"
        )
    exp = model.expansion
    out = np.empty(X.shape[0])
    for start in range(0, X.shape[0], chunk):
        block = kernel_matrix(X[start:start + chunk], exp.centers, exp.bandwidths)
        out[start:start + chunk] = block @ exp.coefficients
    return float(out[0]) if single else out


def clip(t, M: float):
    """Clamp ``t`` into ``[-M, M]``."""
    if not M > 0:
        raise InvalidArgumentError("clip bound must be positive")
    out = np.clip(t, -M, M)
    return float(out) if np.ndim(out) == 0 else out


def empirical_risk(model: TrainedModel, data: Dataset, clipped: bool = True) -> float:
    pred = predict(model, data.inputs)
    if clipped:
        pred = clip(pred, model.clip_bound)
    return float(np.mean((data.responses - pred) ** 2))


def objective(model: TrainedModel, data: Dataset) -> float:
    """Regularised empirical risk (raw predictor) at the model's coefficients."""
    norm = rkhs_norm_expansion(model.expansion)
    return empirical_risk(model, data, clipped=False) + model.lam * norm**2
