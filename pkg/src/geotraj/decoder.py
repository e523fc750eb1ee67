"""Structured-prediction decoder.

For a query time ``t`` the prediction is the surface point minimizing

    F(p) = sum_n alpha_n(t) * D(p, p_n)**2

where ``D`` is the spherelet geodesic distance and ``alpha`` the kernel
ridge scores. ``F`` is minimized by Riemannian gradient descent: each step
moves along the great circle of the iterate's local sphere in the direction
``-grad F`` and is then re-lifted through the projection plane, which
switches spheres whenever the iterate crosses a grid line.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError
from .kernels import cross_vector
from .manifold import exp_map, project_tangent
from .scores import ScoreModel, scores, train
from .spherelets import SurfaceAtlas, geodesic_distances
from .trajectory import GeoTrajectory

INIT_STRATEGIES = ("nearest_training_point", "previous_prediction")
# relative size of objective round-off; below it Armijo compares noise
ROUNDOFF_RTOL = 1e-12


@dataclass(frozen=True)
class DecoderConfig:
    step_size: float = 0.1
    max_iterations: int = 500
    gradient_tolerance: float = 1e-8
    init_strategy: str = "previous_prediction"
    line_search: bool = True
    armijo: float = 1e-4

    def __post_init__(self):
        if not self.step_size > 0:
            raise ValueError("step_size must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.gradient_tolerance > 0:
            raise ValueError("gradient_tolerance must be > 0")
        if self.init_strategy not in INIT_STRATEGIES:
            raise ValueError(f"init_strategy must be one of {INIT_STRATEGIES}")


@dataclass(frozen=True)
class Prediction:
    time: float
    point: np.ndarray
    objective_value: float
    iterations_used: int
    converged: bool


def objective(atlas: SurfaceAtlas, alphas, demos, p) -> float:
    alphas = np.asarray(alphas, dtype=float)
    demos = np.asarray(demos, dtype=float).reshape(-1, 3)
    if alphas.shape[0] != demos.shape[0]:
        raise ValueError(f"{alphas.shape[0]} scores for {demos.shape[0]} demonstrations")
    d = geodesic_distances(atlas, p, demos)
    return float(alphas @ (d * d))


def _value_and_gradient(atlas, alphas, demos, p):
    """Objective and Euclidean gradient at ``p`` (on its local sphere)."""
    sphere = atlas.sphere_at(p)
    d, first = geodesic_distances(atlas, p, demos, return_first=True)
    u = sphere.unit(p)
    # unit tangents at p toward each path's first waypoint
    dirs = (first - sphere.center) / sphere.radius
    tang = dirs - np.outer(dirs @ u, u)
    norms = np.linalg.norm(tang, axis=1)
    ok = (d > 0) & (norms > 0)
    tang[ok] /= norms[ok, None]
    tang[~ok] = 0.0
    grad = -2.0 * (alphas * d) @ tang
    return float(alphas @ (d * d)), grad, sphere


def euclidean_gradient(atlas: SurfaceAtlas, alphas, demos, p) -> np.ndarray:
    """``2 sum alpha_n D_n dD_n/dp`` with ``dD_n/dp`` the negative unit tangent
    of the first arc toward demo ``n`` (exact on a single sphere)."""
    alphas = np.asarray(alphas, dtype=float)
    demos = np.asarray(demos, dtype=float).reshape(-1, 3)
    return _value_and_gradient(atlas, alphas, demos, p)[1]


def riemannian_gradient(atlas: SurfaceAtlas, alphas, demos, p) -> np.ndarray:
    grad = euclidean_gradient(atlas, alphas, demos, p)
    return project_tangent(atlas.sphere_at(p), p, grad)


def _sufficient_decrease(f: float, fc: float, required: float) -> bool:
    """Armijo test, relaxed once the required decrease drops below the
    round-off of ``f`` (the approximate-Armijo rule of Hager and Zhang)."""
    noise = ROUNDOFF_RTOL * abs(f)
    if required > noise:
        return fc <= f - required
    return fc <= f + noise


def minimize(atlas: SurfaceAtlas, alphas, demos, init, cfg: DecoderConfig | None = None):
    """Riemannian gradient descent on ``F`` from ``init``.

    Returns ``(point, objective_value, iterations, converged)``. The descent
    uses weights ``alphas / sum|alphas|``, which has the same minimizers but
    makes the step size and tolerance independent of the score magnitude.
    """
    cfg = cfg or DecoderConfig()
    alphas = np.asarray(alphas, dtype=float)
    demos = np.asarray(demos, dtype=float).reshape(-1, 3)
    p = atlas.relift(np.asarray(init, dtype=float))
    mass = np.abs(alphas).sum()
    if mass == 0.0:
        return p, 0.0, 0, True
    w = alphas / mass

    f, grad, sphere = _value_and_gradient(atlas, w, demos, p)
    iters = 0
    converged = False
    while True:
        rgrad = project_tangent(sphere, p, grad)
        gnorm2 = float(rgrad @ rgrad)
        if np.sqrt(gnorm2) < cfg.gradient_tolerance:
            converged = True
            break
        if iters >= cfg.max_iterations:
            break
        step = cfg.step_size
        cand = None
        while step >= cfg.step_size * 2.0**-30:
            try:
                trial = atlas.relift(exp_map(sphere, p, -step * rgrad))
                fc, gc, sc = _value_and_gradient(atlas, w, demos, trial)
            except GeometryError:
                step *= 0.5
                continue
            if not cfg.line_search or _sufficient_decrease(f, fc, cfg.armijo * step * gnorm2):
                cand = trial
                break
            step *= 0.5
        if cand is None:
            # no representable decrease left along -grad
            break
        p, f, grad, sphere = cand, fc, gc, sc
        iters += 1
    return p, f * mass, iters, converged


def nearest_training_index(model: ScoreModel, t: float) -> int:
    """Training sample closest to ``t`` in the kernel-induced distance,
    i.e. the one maximizing ``k(t, t_n)``."""
    return int(np.argmax(cross_vector(model.kernel, t, model.times)))


def predict(
    model: ScoreModel,
    atlas: SurfaceAtlas,
    demos,
    t: float,
    cfg: DecoderConfig | None = None,
    warm_start=None,
) -> Prediction:
    cfg = cfg or DecoderConfig()
    demos = np.asarray(demos, dtype=float).reshape(-1, 3)
    if demos.shape[0] != model.n:
        raise ValueError(f"model trained on {model.n} samples but {demos.shape[0]} demos given")
    alphas = scores(model, t)
    init = demos[nearest_training_index(model, t)] if warm_start is None else warm_start
    point, value, iters, converged = minimize(atlas, alphas, demos, init, cfg)
    return Prediction(float(t), point, value, iters, converged)


def imitate(
    demos: GeoTrajectory,
    kernel,
    lam: float,
    atlas: SurfaceAtlas,
    query_times,
    cfg: DecoderConfig | None = None,
    return_predictions: bool = False,
):
    """Train once on the demonstration, then decode every query time in order.

    With ``init_strategy == "previous_prediction"`` each query is started from
    the previous output, so queries are processed sequentially.
    """
    cfg = cfg or DecoderConfig()
    query_times = np.asarray(query_times, dtype=float).reshape(-1)
    if len(demos) == 0:
        raise ValueError("empty demonstration")
    model = train(kernel, demos.times, lam)
    preds = []
    warm = None
    for t in query_times:
        pred = predict(model, atlas, demos.points, t, cfg, warm_start=warm)
        preds.append(pred)
        if cfg.init_strategy == "previous_prediction":
            warm = pred.point
    points = np.array([p.point for p in preds]).reshape(-1, 3)
    traj = GeoTrajectory(query_times, points, demos.period)
    if return_predictions:
        return traj, preds
    return traj
