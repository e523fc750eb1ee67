"""Periodic and quasi-periodic trajectories on a sphere.

Generators take one base period ``P(tau), tau in [0, T)`` and extend it:

* periodic:   ``P(tau + aT) = P(tau)``
* arithmetic: ``P(tau + aT) = Exp_{P_{a-1}}(Gamma_{P(tau) -> P_{a-1}} c(tau))``
* cumulative: same, with the transported drift scaled by the period index ``a``

where ``P_a = P(tau + aT)`` and ``c(tau)`` is a tangent vector at ``P(tau)``.
On a single sphere both quasi-periodic kinds keep every ``P_a`` on the great
circle through ``P(tau)`` in direction ``c(tau)``, which is what
:func:`check_pattern` verifies through distances alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DataError, GeometryError
from .manifold import CUT_LOCUS_MARGIN, Sphere, exp_map, great_circle_distance, parallel_transport
from .trajectory import GeoTrajectory

PATTERN_KINDS = ("periodic", "arithmetic", "cumulative")

# Fixed parametrization constants of the synthetic demonstrations (radians).
LEMNISCATE_LON = 0.8
LEMNISCATE_LAT = 0.4
SPIRAL_DRIFT = 0.05
C_SHAPE_LATITUDE = np.pi / 6
C_SHAPE_SWEEP = 1.5 * np.pi


def extend_periodic(base: GeoTrajectory, n_periods: int) -> GeoTrajectory:
    if base.period is None:
        raise ValueError("base trajectory has no period")
    if n_periods < 1:
        raise ValueError("n_periods must be >= 1")
    T = base.period
    times = np.concatenate([base.times + a * T for a in range(n_periods)])
    points = np.concatenate([base.points] * n_periods)
    return GeoTrajectory(times, points, T)


def _drift_array(base: GeoTrajectory, drift) -> np.ndarray:
    if callable(drift):
        return np.array([drift(t, p) for t, p in zip(base.times, base.points)], dtype=float)
    drift = np.asarray(drift, dtype=float)
    return np.broadcast_to(drift, base.points.shape).copy()


def _extend_quasi(base, sphere, drift, n_periods, cumulative):
    if base.period is None:
        raise ValueError("base trajectory has no period")
    if n_periods < 1:
        raise ValueError("n_periods must be >= 1")
    T = base.period
    drifts = _drift_array(base, drift)
    limit = sphere.radius * (np.pi - CUT_LOCUS_MARGIN)
    periods = [base.points]
    prev = base.points
    for a in range(1, n_periods):
        scale = float(a) if cumulative else 1.0
        nxt = np.empty_like(prev)
        for i, (p0, pa, c) in enumerate(zip(base.points, prev, drifts)):
            moved = great_circle_distance(sphere, p0, pa) + scale * np.linalg.norm(c)
            if moved >= limit:
                raise GeometryError(
                    f"cut-locus violation: period {a} drifts {moved:.6g} from its base point"
                )
            step = parallel_transport(sphere, p0, pa, scale * c)
            nxt[i] = exp_map(sphere, pa, step)
        periods.append(nxt)
        prev = nxt
    times = np.concatenate([base.times + a * T for a in range(n_periods)])
    return GeoTrajectory(times, np.concatenate(periods), T)


def extend_arithmetic(base: GeoTrajectory, sphere: Sphere, drift, n_periods: int) -> GeoTrajectory:
    """``drift`` is either one tangent vector per base sample (array ``(n, 3)``)
    or a callable ``drift(tau, point) -> tangent vector``."""
    return _extend_quasi(base, sphere, drift, n_periods, cumulative=False)


def extend_cumulative(base: GeoTrajectory, sphere: Sphere, drift, n_periods: int) -> GeoTrajectory:
    return _extend_quasi(base, sphere, drift, n_periods, cumulative=True)


# --------------------------------------------------------------------------
# checking


@dataclass(frozen=True)
class PatternReport:
    """Largest residuals of each defining relation over all phases/periods.

    ``periodic`` is also the largest step between consecutive periods. The
    quasi-periodic kinds require that step to exceed the tolerance, so a
    purely periodic trajectory does not pass as zero-drift quasi-periodic.
    """

    kind: str
    periodic: float
    arithmetic: float
    cumulative: float
    colinearity: float

    def residual(self, kind: str | None = None) -> float:
        kind = kind or self.kind
        if kind == "periodic":
            return self.periodic
        if kind == "arithmetic":
            return max(self.arithmetic, self.colinearity)
        return max(self.cumulative, self.colinearity)

    def passed(self, tol: float = 1e-6, kind: str | None = None) -> bool:
        kind = kind or self.kind
        if kind == "periodic":
            return self.periodic <= tol
        return self.residual(kind) <= tol and self.periodic > tol

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "periodic": self.periodic,
            "arithmetic": self.arithmetic,
            "cumulative": self.cumulative,
            "colinearity": self.colinearity,
        }


def aligned_periods(traj: GeoTrajectory, T: float, rtol: float = 1e-9) -> np.ndarray:
    """Stack the samples as ``(n_periods, n_phases, 3)``.

    Every phase of the first period must reappear at ``tau + aT`` in each
    later period; trailing incomplete periods are dropped.
    """
    if not T > 0:
        raise ValueError("period must be > 0")
    t0 = traj.times[0]
    phase_mask = traj.times < t0 + T * (1 - rtol)
    taus = traj.times[phase_mask]
    n_periods = int(np.floor((traj.times[-1] - t0) / T + rtol)) + 1
    tol = rtol * max(T, abs(traj.times[-1]))
    rows = []
    for a in range(n_periods):
        target = taus + a * T
        idx = np.searchsorted(traj.times, target - tol)
        idx = np.minimum(idx, len(traj) - 1)
        hit = np.abs(traj.times[idx] - target) <= tol
        if not hit.all():
            if a == n_periods - 1 and a > 0:
                break
            raise DataError(f"misaligned sampling: period {a} lacks samples at tau + {a}T")
        rows.append(traj.points[idx])
    return np.stack(rows)


def check_pattern(
    traj: GeoTrajectory,
    T: float,
    kind: str,
    distance: Callable[[np.ndarray, np.ndarray], float],
) -> PatternReport:
    """Residuals of the periodic / arithmetic / cumulative relations.

    ``distance(a, b)`` is any surface distance, e.g. a great-circle distance
    on a known sphere or an atlas geodesic distance. All three relations are
    evaluated; ``kind`` only selects which one :meth:`PatternReport.passed`
    judges by default.
    """
    if kind not in PATTERN_KINDS:
        raise ValueError(f"unknown pattern kind {kind!r}")
    P = aligned_periods(traj, T)
    A = P.shape[0]
    if A < 3:
        raise DataError(f"pattern check needs >= 3 periods, got {A}")
    steps = np.array([[distance(P[a, i], P[a + 1, i]) for i in range(P.shape[1])] for a in range(A - 1)])
    skips = np.array([[distance(P[a - 1, i], P[a + 1, i]) for i in range(P.shape[1])] for a in range(1, A - 1)])
    # steps[a - 1] is D(P_{a-1}, P_a) for period index a = 1 .. A-1
    idx = np.arange(1, A)[:, None].astype(float)
    arithmetic = np.abs(steps[1:] - steps[:-1])
    cumulative = np.abs(steps[1:] / idx[1:] - steps[:-1] / idx[:-1])
    colinear = np.abs(skips - steps[:-1] - steps[1:])
    return PatternReport(
        kind=kind,
        periodic=float(steps.max()),
        arithmetic=float(arithmetic.max()),
        cumulative=float(cumulative.max()),
        colinearity=float(colinear.max()),
    )


def sphere_distance(sphere: Sphere) -> Callable:
    return lambda a, b: great_circle_distance(sphere, a, b)


# --------------------------------------------------------------------------
# synthetic demonstrations


def _from_latlon(sphere: Sphere, lat, lon) -> np.ndarray:
    d = np.stack([np.cos(lat) * np.cos(lon), np.cos(lat) * np.sin(lon), np.sin(lat)], axis=-1)
    return sphere.center + sphere.radius * d


def _north(lat, lon) -> np.ndarray:
    return np.stack([-np.sin(lat) * np.cos(lon), -np.sin(lat) * np.sin(lon), np.cos(lat)], axis=-1)


def synth_demo(shape: str, sphere: Sphere, n_samples: int, n_periods: int, dt: float = 1.0) -> GeoTrajectory:
    """Synthetic demonstration on ``sphere``, sampled every ``dt`` time units.

    * ``c_shape``: three quarters of the small circle at latitude 30 degrees,
      traversed once over ``n_samples * n_periods`` samples (no period).
    * ``infinity``: the figure-eight ``lon = 0.8 sin(s), lat = 0.4 sin(2 s)``
      with ``n_samples`` per period, repeated ``n_periods`` times.
    * ``spiral``: the figure-eight with a cumulative northward drift of
      0.05 rad per period.
    """
    if n_samples < 1 or n_periods < 1 or not dt > 0:
        raise ValueError("n_samples, n_periods and dt must be positive")
    T = n_samples * dt
    if shape == "c_shape":
        total = n_samples * n_periods
        s = np.arange(total) / total * C_SHAPE_SWEEP
        pts = _from_latlon(sphere, np.full_like(s, C_SHAPE_LATITUDE), s)
        return GeoTrajectory(np.arange(total) * dt, pts)
    s = 2 * np.pi * np.arange(n_samples) / n_samples
    lat = LEMNISCATE_LAT * np.sin(2 * s)
    lon = LEMNISCATE_LON * np.sin(s)
    base = GeoTrajectory(np.arange(n_samples) * dt, _from_latlon(sphere, lat, lon), T)
    if shape == "infinity":
        return extend_periodic(base, n_periods)
    if shape == "spiral":
        drift = SPIRAL_DRIFT * sphere.radius * _north(lat, lon)
        return extend_cumulative(base, sphere, drift, n_periods)
    raise ValueError(f"unknown demo shape {shape!r}")


def cap_cloud(sphere: Sphere, axis, n_points: int, rng: np.random.Generator, max_angle: float = 0.49 * np.pi) -> np.ndarray:
    """Uniform samples of the spherical cap of half-angle ``max_angle`` around ``axis``.

    Used as the surface cloud behind synthetic demonstrations; the default
    cap stays just short of a hemisphere so every point lifts from the
    projection plane.
    """
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    helper = np.array([1.0, 0.0, 0.0]) if abs(axis[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(axis, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    z = rng.uniform(np.cos(max_angle), 1.0, n_points)
    phi = rng.uniform(0.0, 2 * np.pi, n_points)
    rho = np.sqrt(1.0 - z * z)
    local = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)
    return sphere.center + sphere.radius * (local @ np.stack([e1, e2, axis]))
