"""Surface approximation by a grid of osculating spheres ("spherelets").

A point cloud is projected onto its least-variance plane, the plane is cut
by vertical (constant first coordinate) and horizontal (constant second
coordinate) grid lines, and every cell gets its own sphere fitted in closed
form. Geodesic distances are then sums of great-circle arcs, one per cell
the straight in-plane segment between the two endpoints passes through.

Conventions
-----------
* Cells are half-open ``[lo, hi)`` in both plane coordinates, so a point
  lying exactly on a grid line belongs to the higher-index cell. The outer
  cells extend to infinity.
* Points are lifted from the plane along the plane normal onto the cell's
  sphere, taking the intersection on the same side of the sphere center as
  the cell's data.
* A grid intersection borders two cells; it is lifted separately onto each
  adjacent cell's sphere, and every arc is measured on the sphere of the
  cell it traverses.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, NumericalError
from .manifold import Sphere

MAX_CONDITION = 1e12


# --------------------------------------------------------------------------
# sphere fit and projection plane


def fit_spherelet(points) -> Sphere:
    """Closed-form minimizer of the algebraic loss ``sum((|x - O|^2 - r^2)^2)``.

    The center solves ``2 Lambda O = theta`` with ``Lambda`` the scatter
    matrix of the points and ``theta = sum((|x|^2 - mean|x|^2)(x - mean x))``;
    the radius is the mean distance of the points to the center. Everything
    is computed in centroid-relative coordinates, which leaves the result
    unchanged but avoids cancellation for clouds far from the origin.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if pts.shape[0] < 4:
        raise NumericalError(f"degenerate patch: sphere fit needs >= 4 points, got {pts.shape[0]}")
    mean = pts.mean(axis=0)
    y = pts - mean
    lam = y.T @ y
    sq = np.einsum("ij,ij->i", y, y)
    theta = ((sq - sq.mean())[:, None] * y).sum(axis=0)
    if not np.all(np.isfinite(lam)) or np.linalg.cond(lam) > MAX_CONDITION:
        raise NumericalError("degenerate patch: sphere fit ill-posed")
    center = mean + 0.5 * np.linalg.solve(lam, theta)
    radius = float(np.linalg.norm(pts - center, axis=1).mean())
    return Sphere(center, radius)


@dataclass(frozen=True)
class ProjectionPlane:
    """Plane through ``origin`` with unit ``normal``; ``(axis1, axis2, normal)``
    is a right-handed orthonormal frame."""

    origin: np.ndarray
    normal: np.ndarray
    axis1: np.ndarray
    axis2: np.ndarray

    def to_plane(self, points) -> np.ndarray:
        """In-plane coordinates ``(u, v)`` of the perpendicular projection."""
        d = np.asarray(points, dtype=float) - self.origin
        return np.stack([d @ self.axis1, d @ self.axis2], axis=-1)

    def height(self, points) -> np.ndarray:
        return (np.asarray(points, dtype=float) - self.origin) @ self.normal

    def from_plane(self, uv) -> np.ndarray:
        uv = np.asarray(uv, dtype=float)
        return self.origin + uv[..., :1] * self.axis1 + uv[..., 1:2] * self.axis2


def projection_plane(cloud) -> ProjectionPlane:
    """Plane through the centroid whose normal is the least principal axis.

    The normal is oriented so that at least half of the points have a
    nonnegative offset along it; ``axis1`` is the main principal axis with
    its largest-magnitude component made positive.
    """
    pts = np.asarray(cloud, dtype=float).reshape(-1, 3)
    if pts.shape[0] < 3:
        raise GeometryError("projection plane needs at least 3 points")
    origin = pts.mean(axis=0)
    d = pts - origin
    cov = d.T @ d / pts.shape[0]
    evals, evecs = np.linalg.eigh(cov)
    if evals[1] <= 1e-12 * max(evals[2], 1e-300):
        raise GeometryError("points are collinear; projection plane undefined")
    normal = evecs[:, 0]
    offsets = d @ normal
    if np.count_nonzero(offsets >= 0) < np.count_nonzero(offsets < 0):
        normal = -normal
    axis1 = evecs[:, 2]
    if axis1[np.argmax(np.abs(axis1))] < 0:
        axis1 = -axis1
    axis2 = np.cross(normal, axis1)
    axis2 /= np.linalg.norm(axis2)
    return ProjectionPlane(origin, normal / np.linalg.norm(normal), axis1, axis2)


# --------------------------------------------------------------------------
# grid


@dataclass(frozen=True)
class GridSpec:
    """Grid lines in plane coordinates; no lines means a single cell."""

    vertical: tuple = ()
    horizontal: tuple = ()

    def __post_init__(self):
        v = tuple(float(x) for x in self.vertical)
        h = tuple(float(x) for x in self.horizontal)
        for name, lines in (("vertical", v), ("horizontal", h)):
            if any(b <= a for a, b in zip(lines, lines[1:])):
                raise ValueError(f"{name} grid lines must be strictly increasing")
        object.__setattr__(self, "vertical", v)
        object.__setattr__(self, "horizontal", h)

    @classmethod
    def uniform(cls, nv: int, nh: int, uv_min, uv_max) -> GridSpec:
        """``nv`` and ``nh`` evenly spaced interior lines over a bounding box."""
        if nv < 0 or nh < 0:
            raise ValueError("line counts must be >= 0")
        v = np.linspace(uv_min[0], uv_max[0], nv + 2)[1:-1]
        h = np.linspace(uv_min[1], uv_max[1], nh + 2)[1:-1]
        return cls(tuple(v), tuple(h))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.vertical) + 1, len(self.horizontal) + 1

    def cell_of(self, uv) -> tuple[np.ndarray, np.ndarray]:
        uv = np.asarray(uv, dtype=float)
        col = np.searchsorted(np.asarray(self.vertical), uv[..., 0], side="right")
        row = np.searchsorted(np.asarray(self.horizontal), uv[..., 1], side="right")
        return col, row


# --------------------------------------------------------------------------
# atlas


@dataclass(frozen=True)
class SurfaceAtlas:
    """Projection plane, grid and one sphere per fitted cell.

    Per-cell data are stored as ``(ncol, nrow)`` arrays; empty cells carry
    NaN centers and radii.
    """

    plane: ProjectionPlane
    grid: GridSpec
    centers: np.ndarray
    radii: np.ndarray
    sides: np.ndarray
    counts: np.ndarray = field(repr=False)

    @property
    def fitted(self) -> np.ndarray:
        return np.isfinite(self.radii)

    @property
    def cells(self) -> dict:
        """``{(col, row): Sphere}`` for every fitted cell."""
        out = {}
        for col, row in zip(*np.nonzero(self.fitted)):
            out[(int(col), int(row))] = Sphere(self.centers[col, row], self.radii[col, row])
        return out

    def cell_of(self, point) -> tuple[int, int]:
        col, row = self.grid.cell_of(self.plane.to_plane(point))
        return int(col), int(row)

    def sphere_at(self, point) -> Sphere:
        """Sphere of the cell containing the projection of ``point``."""
        col, row = self.cell_of(point)
        if not self.fitted[col, row]:
            raise GeometryError(f"point projects into empty cell {(col, row)}")
        return Sphere(self.centers[col, row], self.radii[col, row])

    def lift(self, uv, col=None, row=None) -> np.ndarray:
        """Vectorized perpendicular lift of plane coordinates onto cell spheres.

        Without explicit cells each point is lifted in the cell it falls in.
        """
        uv = np.asarray(uv, dtype=float)
        if col is None:
            col, row = self.grid.cell_of(uv)
        col = np.asarray(col)
        row = np.asarray(row)
        if not np.all(self.fitted[col, row]):
            raise GeometryError("empty cell: point not on the fitted surface")
        centers = self.centers[col, row]
        radii = self.radii[col, row]
        sides = self.sides[col, row]
        q = self.plane.from_plane(uv)
        w = q - centers
        wn = w @ self.plane.normal
        perp2 = np.einsum("...i,...i->...", w, w) - wn**2
        disc = radii**2 - perp2
        tol = 1e-12 * radii**2
        if np.any(disc < -tol):
            raise GeometryError("point not liftable: outside the sphere's shadow on the plane")
        root = np.sqrt(np.maximum(disc, 0.0))
        s = -wn + sides * root
        return q + s[..., None] * self.plane.normal

    def project(self, point) -> np.ndarray:
        return self.plane.to_plane(point)

    def relift(self, point) -> np.ndarray:
        """Project a 3-D point to the plane and lift it back in its own cell."""
        return self.lift(self.plane.to_plane(point))

    def summary(self) -> dict:
        cells = []
        for (col, row), sph in sorted(self.cells.items()):
            cells.append(
                {
                    "col": col,
                    "row": row,
                    "points": int(self.counts[col, row]),
                    "center": sph.center.tolist(),
                    "radius": sph.radius,
                }
            )
        return {
            "plane_origin": self.plane.origin.tolist(),
            "plane_normal": self.plane.normal.tolist(),
            "plane_axis1": self.plane.axis1.tolist(),
            "plane_axis2": self.plane.axis2.tolist(),
            "grid_vertical": list(self.grid.vertical),
            "grid_horizontal": list(self.grid.horizontal),
            "cells_fitted": int(self.fitted.sum()),
            "cells_empty": int((~self.fitted).sum()),
            "cells": cells,
        }


def build_atlas(cloud, grid: GridSpec | None = None, plane: ProjectionPlane | None = None) -> SurfaceAtlas:
    """Fit one spherelet per grid cell of the projected cloud.

    Cells with fewer than four points, or whose fit is ill-conditioned, are
    left empty (with a warning). ``plane`` overrides the principal-axis plane.
    """
    pts = np.asarray(cloud, dtype=float).reshape(-1, 3)
    grid = grid or GridSpec()
    plane = plane or projection_plane(pts)
    col, row = grid.cell_of(plane.to_plane(pts))
    shape = grid.shape
    centers = np.full(shape + (3,), np.nan)
    radii = np.full(shape, np.nan)
    sides = np.ones(shape)
    counts = np.zeros(shape, dtype=int)
    flat = col * shape[1] + row
    order = np.argsort(flat, kind="stable")
    keys, starts = np.unique(flat[order], return_index=True)
    for key, members in zip(keys, np.split(order, starts[1:])):
        c, r = divmod(int(key), shape[1])
        counts[c, r] = members.size
        if members.size < 4:
            warnings.warn(f"cell {(c, r)} has {members.size} points; left empty", stacklevel=2)
            continue
        patch = pts[members]
        try:
            sph = fit_spherelet(patch)
        except NumericalError as exc:
            warnings.warn(f"cell {(c, r)}: {exc}; left empty", stacklevel=2)
            continue
        centers[c, r] = sph.center
        radii[c, r] = sph.radius
        offset = (patch.mean(axis=0) - sph.center) @ plane.normal
        sides[c, r] = 1.0 if offset >= 0 else -1.0
    for c, r in zip(*np.nonzero(counts == 0)):
        warnings.warn(f"cell {(int(c), int(r))} has 0 points; left empty", stacklevel=2)
    if not np.isfinite(radii).any():
        raise NumericalError("no grid cell could be fitted with a spherelet")
    for a in (centers, radii, sides, counts):
        a.setflags(write=False)
    return SurfaceAtlas(plane, grid, centers, radii, sides, counts)


def lift_to_surface(atlas: SurfaceAtlas, plane_point) -> np.ndarray:
    """Perpendicular lift of one in-plane point onto its cell's spherelet."""
    return atlas.lift(np.asarray(plane_point, dtype=float).reshape(2))


# --------------------------------------------------------------------------
# geodesic distance


def _crossings(atlas: SurfaceAtlas, ua: np.ndarray, ub: np.ndarray) -> np.ndarray:
    """Sorted crossing parameters in (0, 1) per segment, padded with 1.0."""
    d = ub - ua
    parts = []
    for axis, lines in ((0, atlas.grid.vertical), (1, atlas.grid.horizontal)):
        if not lines:
            continue
        c = np.asarray(lines)[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (c - ua[:, axis : axis + 1]) / d[:, axis : axis + 1]
        parts.append(s)
    if not parts:
        return np.ones((ua.shape[0], 0))
    s = np.concatenate(parts, axis=1)
    s = np.where((s > 0.0) & (s < 1.0), s, 1.0)
    return np.sort(s, axis=1)


def _arc_angles(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    cross = np.linalg.norm(np.cross(u, w), axis=-1)
    dot = np.einsum("...i,...i->...", u, w)
    return np.arctan2(cross, dot)


def geodesic_distances(atlas: SurfaceAtlas, a, bs, return_first: bool = False):
    """Spherelet geodesic distances from ``a`` to every row of ``bs``.

    With ``return_first`` also returns, for every pair, the first waypoint
    of the path lifted onto ``a``'s sphere (the next segmentation point, or
    the far endpoint when both share a cell).
    """
    bs = np.asarray(bs, dtype=float).reshape(-1, 3)
    nb = bs.shape[0]
    ua = np.broadcast_to(atlas.plane.to_plane(np.asarray(a, dtype=float).reshape(3)), (nb, 2))
    ub = atlas.plane.to_plane(bs)
    s = _crossings(atlas, ua, ub)
    params = np.concatenate([np.zeros((nb, 1)), s, np.ones((nb, 1))], axis=1)
    lo, hi = params[:, :-1], params[:, 1:]
    live = hi > lo
    mid = 0.5 * (lo + hi)
    d = (ub - ua)[:, None, :]
    uv_lo = ua[:, None, :] + lo[..., None] * d
    uv_hi = ua[:, None, :] + hi[..., None] * d
    col, row = atlas.grid.cell_of(ua[:, None, :] + mid[..., None] * d)
    if not np.all(atlas.fitted[col[live], row[live]]):
        raise GeometryError("path leaves fitted surface")
    # dead (zero-length) segments are evaluated at a in a's cell; they contribute 0
    col0, row0 = atlas.grid.cell_of(ua[:1])
    col = np.where(live, col, col0[0])
    row = np.where(live, row, row0[0])
    uv_lo = np.where(live[..., None], uv_lo, ua[:, None, :])
    uv_hi = np.where(live[..., None], uv_hi, ua[:, None, :])
    p_lo = atlas.lift(uv_lo, col, row)
    p_hi = atlas.lift(uv_hi, col, row)
    centers = atlas.centers[col, row]
    radii = atlas.radii[col, row]
    arcs = radii * _arc_angles(p_lo - centers, p_hi - centers)
    dist = np.where(live, arcs, 0.0).sum(axis=1)
    if return_first:
        return dist, p_hi[:, 0, :]
    return dist


def geodesic_distance(atlas: SurfaceAtlas, a, b) -> float:
    """Spherelet approximation of the on-surface distance between two points."""
    return float(geodesic_distances(atlas, a, b)[0])


def segmentation_points(atlas: SurfaceAtlas, a, b) -> np.ndarray:
    """Grid crossings of the in-plane segment from ``a`` to ``b``, lifted.

    Returned in order along the segment, shape ``(L, 3)``. Each crossing is
    lifted onto the sphere of the cell the path enters next.
    """
    ua = atlas.plane.to_plane(np.asarray(a, dtype=float).reshape(1, 3))
    ub = atlas.plane.to_plane(np.asarray(b, dtype=float).reshape(1, 3))
    s = _crossings(atlas, ua, ub)[0]
    s = np.unique(s[s < 1.0])
    if s.size == 0:
        return np.zeros((0, 3))
    nxt = np.append(s[1:], 1.0)
    d = ub[0] - ua[0]
    col, row = atlas.grid.cell_of(ua[0] + (0.5 * (s + nxt))[:, None] * d)
    col0, row0 = atlas.grid.cell_of(ua[0] + 0.5 * s[0] * d)
    if not atlas.fitted[col0, row0] or not np.all(atlas.fitted[col, row]):
        raise GeometryError("path leaves fitted surface")
    return atlas.lift(ua[0] + s[:, None] * d, col, row)
