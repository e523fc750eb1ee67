"""Closed-form geometry on a sphere with arbitrary center and radius.

Points are 3-vectors in ambient coordinates; tangent vectors are plain
3-vectors orthogonal to ``point - center``. All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError

ON_SPHERE_RTOL = 1e-6
CUT_LOCUS_MARGIN = 1e-6


@dataclass(frozen=True)
class Sphere:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float).reshape(3)
        object.__setattr__(self, "center", center)
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"sphere radius must be > 0, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))

    def unit(self, point) -> np.ndarray:
        """Outward unit normal at ``point`` (checks that it lies on the sphere)."""
        d = np.asarray(point, dtype=float) - self.center
        norm = np.linalg.norm(d)
        if abs(norm - self.radius) > ON_SPHERE_RTOL * self.radius:
            raise GeometryError(
                f"point is off the sphere: |p - O| = {norm:.12g}, radius = {self.radius:.12g}"
            )
        return d / norm

    def contains(self, point, rtol: float = ON_SPHERE_RTOL) -> bool:
        d = np.linalg.norm(np.asarray(point, dtype=float) - self.center)
        return abs(d - self.radius) <= rtol * self.radius


def _angle(u, w) -> float:
    # atan2 keeps full precision for both tiny and near-pi angles
    return float(np.arctan2(np.linalg.norm(np.cross(u, w)), np.dot(u, w)))


def exp_map(s: Sphere, base, vec) -> np.ndarray:
    """Follow the great circle from ``base`` along ``vec`` for arc length ``|vec|``."""
    u = s.unit(base)
    vec = np.asarray(vec, dtype=float)
    radial = float(np.dot(vec, u))
    # max-abs scale: the 2-norm of a tiny vector can underflow to zero
    if abs(radial) > ON_SPHERE_RTOL * np.abs(vec).max():
        raise GeometryError("exp_map expects a tangent vector")
    vec = vec - radial * u
    speed = np.linalg.norm(vec)
    if speed == 0.0:
        return s.center + s.radius * u
    theta = speed / s.radius
    direction = np.cos(theta) * u + np.sin(theta) * (vec / speed)
    return s.center + s.radius * direction / np.linalg.norm(direction)


def log_map(s: Sphere, base, target) -> np.ndarray:
    """Tangent vector at ``base`` whose exponential reaches ``target``."""
    u = s.unit(base)
    w = s.unit(target)
    theta = _angle(u, w)
    if theta > np.pi - CUT_LOCUS_MARGIN:
        raise GeometryError("log map undefined at cut locus")
    perp = w - np.dot(u, w) * u
    norm = np.linalg.norm(perp)
    if theta == 0.0 or norm == 0.0:
        return np.zeros(3)
    return s.radius * theta * perp / norm


def project_tangent(s: Sphere, base, v) -> np.ndarray:
    """Orthogonal projection of ``v`` onto the tangent plane at ``base``.

    Uses the unit-normal projector ``I - u u^T``; see the README for how this
    relates to the ``r^2 I - p p^T`` form.
    """
    u = s.unit(base)
    v = np.asarray(v, dtype=float)
    return v - u * np.dot(u, v)


def parallel_transport(s: Sphere, frm, to, v) -> np.ndarray:
    """Transport tangent vector ``v`` at ``frm`` along the geodesic to ``to``."""
    u = s.unit(frm)
    w = s.unit(to)
    v = np.asarray(v, dtype=float)
    theta = _angle(u, w)
    if theta > np.pi - CUT_LOCUS_MARGIN:
        raise GeometryError("parallel transport undefined at cut locus")
    perp = w - np.dot(u, w) * u
    norm = np.linalg.norm(perp)
    if theta == 0.0 or norm == 0.0:
        return v.copy()
    e = perp / norm
    along = float(np.dot(v, e))
    return v + along * ((np.cos(theta) - 1.0) * e - np.sin(theta) * u)


def great_circle_distance(s: Sphere, a, b) -> float:
    """Arc length ``r * arccos(<(a - O)/r, (b - O)/r>)`` between two points."""
    return s.radius * _angle(s.unit(a), s.unit(b))


def random_tangent(s: Sphere, base, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Gaussian tangent vector at ``base``; handy for tests and generators."""
    return scale * project_tangent(s, base, rng.normal(size=3))
