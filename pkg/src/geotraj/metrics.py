"""Reproduction and generalization errors of an imitated trajectory."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DataError
from .trajectory import GeoTrajectory


def unit_sphere_distance(a, b) -> float:
    """``arccos(a . b)`` for points on the unit sphere centered at the origin."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(np.arccos(np.clip(a @ b, -1.0, 1.0)))


def residuals(pred: GeoTrajectory, truth: GeoTrajectory, distance: Callable = unit_sphere_distance) -> np.ndarray:
    if len(pred) != len(truth) or not np.allclose(pred.times, truth.times, rtol=0, atol=1e-9):
        raise DataError("prediction and ground truth timestamps do not match")
    return np.array([distance(p, q) for p, q in zip(pred.points, truth.points)])


def reproduction_error(pred: GeoTrajectory, truth: GeoTrajectory, distance: Callable = unit_sphere_distance) -> float:
    """Mean distance between predictions and demonstrations at the training times."""
    r = residuals(pred, truth, distance)
    if r.size == 0:
        raise DataError("empty reproduction set")
    return float(r.mean())


def generalization_error(pred: GeoTrajectory, truth: GeoTrajectory, distance: Callable = unit_sphere_distance) -> float:
    """Mean distance over the held-out (non-training) samples."""
    r = residuals(pred, truth, distance)
    if r.size == 0:
        raise DataError("empty generalization set")
    return float(r.mean())


@dataclass
class EvalReport:
    c_t: float
    c_g: float | None
    n: int
    m: int
    distance_kind: str
    residuals: list = field(default_factory=list)

    def to_json(self) -> str:
        doc = {
            "c_t": self.c_t,
            "c_g": self.c_g,
            "n": self.n,
            "m": self.m,
            "distance_kind": self.distance_kind,
            "residuals": [float(x) for x in self.residuals],
        }
        return json.dumps(doc, indent=2, sort_keys=False)


def evaluate(
    pred: GeoTrajectory,
    truth: GeoTrajectory,
    n_train: int,
    distance: Callable = unit_sphere_distance,
    distance_kind: str = "sphere_arccos",
) -> EvalReport:
    """Score a prediction over ``truth``; the first ``n_train`` samples are the
    training part, the rest the generalization part (``c_g`` is None if empty)."""
    if not 0 < n_train <= len(truth):
        raise DataError(f"n_train must be in [1, {len(truth)}], got {n_train}")
    r = residuals(pred, truth, distance)
    c_t = float(r[:n_train].mean())
    c_g = float(r[n_train:].mean()) if r.size > n_train else None
    return EvalReport(c_t, c_g, n_train, len(truth), distance_kind, r.tolist())
