"""Scalar reproducing kernels on time and Gram-matrix construction.

Three families are provided:

- ``se``:  squared exponential, ``sigma_s**2 * exp(-(t - t')**2 / (2 l_s**2))``
- ``per``: periodic, ``sigma_p**2 * exp(-2 sin(pi (t - t') / p)**2 / l_p**2)``
- ``qp``:  quasi-periodic, the product of the two above.

Time is treated as a dimensionless real; the caller decides whether it
counts seconds or sample indices, and the length-scales and period must be
given in the same unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

KINDS = ("se", "per", "qp")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus hyperparameters.

    Only the fields used by ``kind`` are validated; the others are ignored.
    Use the :meth:`se`, :meth:`per` and :meth:`qp` constructors rather than
    filling fields by hand.
    """

    kind: str
    sigma_s: float = 1.0
    l_s: float = 1.0
    sigma_p: float = 1.0
    l_p: float = 1.0
    period: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")
        checks = []
        if self.kind in ("se", "qp"):
            checks += [("sigma_s", self.sigma_s), ("l_s", self.l_s)]
        if self.kind in ("per", "qp"):
            checks += [("sigma_p", self.sigma_p), ("l_p", self.l_p), ("period", self.period)]
        for name, value in checks:
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"kernel hyperparameter {name} must be finite and > 0, got {value}")

    @classmethod
    def se(cls, sigma_s: float, l_s: float) -> KernelSpec:
        return cls("se", sigma_s=sigma_s, l_s=l_s)

    @classmethod
    def per(cls, sigma_p: float, l_p: float, period: float) -> KernelSpec:
        return cls("per", sigma_p=sigma_p, l_p=l_p, period=period)

    @classmethod
    def qp(cls, sigma_s: float, l_s: float, sigma_p: float, l_p: float, period: float) -> KernelSpec:
        return cls("qp", sigma_s=sigma_s, l_s=l_s, sigma_p=sigma_p, l_p=l_p, period=period)

    @property
    def zero_lag(self) -> float:
        """Value of k(t, t)."""
        value = 1.0
        if self.kind in ("se", "qp"):
            value *= self.sigma_s**2
        if self.kind in ("per", "qp"):
            value *= self.sigma_p**2
        return value

    def se_part(self) -> KernelSpec:
        return KernelSpec.se(self.sigma_s, self.l_s)

    def per_part(self) -> KernelSpec:
        return KernelSpec.per(self.sigma_p, self.l_p, self.period)


def _se(spec: KernelSpec, lag):
    return spec.sigma_s**2 * np.exp(-(lag**2) / (2.0 * spec.l_s**2))


def _per(spec: KernelSpec, lag):
    s = np.sin(np.pi * lag / spec.period)
    return spec.sigma_p**2 * np.exp(-2.0 * s * s / spec.l_p**2)


def kernel_lag(spec: KernelSpec, lag):
    """Evaluate the kernel as a function of the lag ``t - t'`` (array-friendly)."""
    lag = np.asarray(lag, dtype=float)
    if spec.kind == "se":
        return _se(spec, lag)
    if spec.kind == "per":
        return _per(spec, lag)
    return _se(spec, lag) * _per(spec, lag)


def eval_kernel(spec: KernelSpec, t: float, t2: float) -> float:
    return float(kernel_lag(spec, float(t) - float(t2)))


def _as_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float).reshape(-1)
    if times.size == 0:
        raise ValueError("empty training set")
    if not np.all(np.isfinite(times)):
        raise ValueError("training times must be finite")
    return times


def gram(spec: KernelSpec, times) -> np.ndarray:
    """Dense N x N Gram matrix ``K[i, j] = k(times[i], times[j])``.

    Only the upper triangle is evaluated and then mirrored, so the result is
    exactly symmetric.
    """
    times = _as_times(times)
    lag = times[:, None] - times[None, :]
    K = np.triu(kernel_lag(spec, lag))
    return K + np.triu(K, 1).T


def cross_vector(spec: KernelSpec, query: float, times) -> np.ndarray:
    """Vector with entries ``k(query, times[i])``."""
    times = _as_times(times)
    return kernel_lag(spec, float(query) - times)
