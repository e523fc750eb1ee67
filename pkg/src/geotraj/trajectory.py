"""Time-stamped 3-D trajectories."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GeoTrajectory:
    """Samples ``(times[i], points[i])`` with strictly increasing times.

    ``period`` is optional metadata for (quasi-)periodic trajectories.
    """

    times: np.ndarray
    points: np.ndarray
    period: float | None = None

    def __post_init__(self):
        times = np.array(self.times, dtype=float).reshape(-1)
        points = np.array(self.points, dtype=float).reshape(-1, 3)
        if times.shape[0] != points.shape[0]:
            raise ValueError(f"{times.shape[0]} times but {points.shape[0]} points")
        if np.any(np.diff(times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        times.setflags(write=False)
        points.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return self.times.shape[0]

    def head(self, n: int) -> GeoTrajectory:
        return GeoTrajectory(self.times[:n], self.points[:n], self.period)

    def tail(self, n: int) -> GeoTrajectory:
        """Everything after the first ``n`` samples."""
        return GeoTrajectory(self.times[n:], self.points[n:], self.period)

    def shifted(self, dt: float) -> GeoTrajectory:
        return GeoTrajectory(self.times + dt, self.points, self.period)
