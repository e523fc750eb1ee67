"""Kernel ridge regression in the implicit surrogate space.

The surrogate targets are never formed. Training only factorizes
``K + lam * N * I``; the score vector for a query time is

    alpha(t) = (K + lam * N * I)^{-1} k(t)

which is all the decoder needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import NumericalError
from .kernels import KernelSpec, cross_vector, gram


@dataclass(frozen=True)
class ScoreModel:
    times: np.ndarray
    kernel: KernelSpec
    lam: float
    factor: tuple  # (lower Cholesky factor, lower flag) as returned by cho_factor
    jitter: float = 0.0

    @property
    def n(self) -> int:
        return self.times.size

    def system_matrix(self) -> np.ndarray:
        """Rebuild ``K + lam N I`` (plus any jitter added during training)."""
        K = gram(self.kernel, self.times)
        return K + (self.lam * self.n + self.jitter) * np.eye(self.n)


def train(kernel: KernelSpec, times, lam: float) -> ScoreModel:
    """Factorize the regularized Gram matrix for the given training times.

    Times need not be sorted or distinct. If the Cholesky factorization
    fails, one retry is made with ``1e-10 * trace(K) / N`` added to the
    diagonal before giving up.
    """
    if not (math.isfinite(lam) and lam > 0):
        raise ValueError(f"nonpositive regularization: lambda = {lam}")
    times = np.array(times, dtype=float).reshape(-1)
    K = gram(kernel, times)
    n = times.size
    A = K + lam * n * np.eye(n)
    jitter = 0.0
    try:
        factor = cho_factor(A, lower=True, check_finite=False)
    except LinAlgError:
        jitter = 1e-10 * np.trace(K) / n
        try:
            factor = cho_factor(A + jitter * np.eye(n), lower=True, check_finite=False)
        except LinAlgError as exc:
            raise NumericalError("gram matrix not positive definite") from exc
    times.setflags(write=False)
    return ScoreModel(times=times, kernel=kernel, lam=float(lam), factor=factor, jitter=jitter)


def scores(model: ScoreModel, query: float) -> np.ndarray:
    """Score vector alpha(query), one weight per training sample."""
    query = float(query)
    if not math.isfinite(query):
        raise ValueError(f"query time must be finite, got {query}")
    k = cross_vector(model.kernel, query, model.times)
    return cho_solve(model.factor, k, check_finite=False)
