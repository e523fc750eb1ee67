import numpy as np
import pytest
from helpers import random_unit
from hypothesis import given
from hypothesis import strategies as st

from geotraj.errors import DataError, GeometryError
from geotraj.manifold import Sphere, great_circle_distance, project_tangent
from geotraj.patterns import (
    PATTERN_KINDS,
    cap_cloud,
    check_pattern,
    extend_arithmetic,
    extend_cumulative,
    extend_periodic,
    sphere_distance,
    synth_demo,
)
from geotraj.spherelets import build_atlas, geodesic_distance
from geotraj.trajectory import GeoTrajectory

UNIT = Sphere(np.zeros(3), 1.0)


def base_on(sphere, rng, n=12, T=10.0):
    d = random_unit(rng, n) + 2 * random_unit(rng)
    d /= np.linalg.norm(d, axis=1)[:, None]
    times = np.arange(n) * T / n
    return GeoTrajectory(times, sphere.center + sphere.radius * d, T)


def drift_of_size(sphere, base, size, rng):
    raw = rng.normal(size=base.points.shape)
    c = np.array([project_tangent(sphere, p, v) for p, v in zip(base.points, raw)])
    return size * c / np.linalg.norm(c, axis=1)[:, None]


def test_periodic_extension(rng):
    base = base_on(UNIT, rng)
    one = extend_periodic(base, 1)
    np.testing.assert_array_equal(one.points, base.points)
    np.testing.assert_array_equal(one.times, base.times)
    four = extend_periodic(base, 4)
    assert len(four) == 4 * len(base)
    n = len(base)
    np.testing.assert_array_equal(four.points[n:2 * n], base.points)
    np.testing.assert_allclose(four.times[n:2 * n], base.times + base.period)
    rep = check_pattern(four, base.period, "periodic", sphere_distance(UNIT))
    assert rep.periodic == 0.0 and rep.passed()


def test_zero_drift_is_periodic(rng):
    base = base_on(UNIT, rng)
    zero = np.zeros_like(base.points)
    ref = extend_periodic(base, 3)
    np.testing.assert_allclose(extend_arithmetic(base, UNIT, zero, 3).points, ref.points, atol=1e-15)
    np.testing.assert_allclose(extend_cumulative(base, UNIT, zero, 3).points, ref.points, atol=1e-15)


@given(st.integers(0, 2**32 - 1), st.floats(0.5, 3.0), st.floats(0.005, 0.1))
def test_arithmetic_distance_identities(seed, radius, angle):
    rng = np.random.default_rng(seed)
    s = Sphere(rng.uniform(-3, 3, 3), radius)
    base = base_on(s, rng)
    c = drift_of_size(s, base, angle * radius, rng)
    traj = extend_arithmetic(base, s, c, 5)
    P = traj.points.reshape(5, len(base), 3)
    for i in range(len(base)):
        d = [great_circle_distance(s, P[a, i], P[a + 1, i]) for a in range(4)]
        np.testing.assert_allclose(d, angle * radius, rtol=1e-9)
        for a in range(1, 4):
            skip = great_circle_distance(s, P[a - 1, i], P[a + 1, i])
            assert abs(skip - d[a - 1] - d[a]) <= 1e-6


@given(st.integers(0, 2**32 - 1), st.floats(0.005, 0.05))
def test_cumulative_distance_identities(seed, angle):
    rng = np.random.default_rng(seed)
    base = base_on(UNIT, rng)
    c = drift_of_size(UNIT, base, angle, rng)
    traj = extend_cumulative(base, UNIT, c, 5)
    P = traj.points.reshape(5, len(base), 3)
    for i in range(len(base)):
        per_a = [great_circle_distance(UNIT, P[a - 1, i], P[a, i]) / a for a in range(1, 5)]
        np.testing.assert_allclose(per_a, angle, rtol=1e-9)
    arith = extend_arithmetic(base, UNIT, c, 2)
    np.testing.assert_array_equal(extend_cumulative(base, UNIT, c, 2).points, arith.points)


def test_cut_locus_violation(rng):
    base = base_on(UNIT, rng)
    c = drift_of_size(UNIT, base, 0.8, rng)
    with pytest.raises(GeometryError, match="cut-locus"):
        extend_arithmetic(base, UNIT, c, 5)
    with pytest.raises(GeometryError, match="cut-locus"):
        extend_cumulative(base, UNIT, drift_of_size(UNIT, base, 0.4, rng), 5)


def test_callable_drift(rng):
    base = base_on(UNIT, rng)
    arr = drift_of_size(UNIT, base, 0.05, rng)
    lookup = dict(zip(base.times, arr))
    a = extend_arithmetic(base, UNIT, lambda t, p: lookup[t], 3)
    np.testing.assert_array_equal(a.points, extend_arithmetic(base, UNIT, arr, 3).points)


def test_generator_checker_duality(rng):
    base = base_on(UNIT, rng)
    c = drift_of_size(UNIT, base, 0.05, rng)
    generated = {
        "periodic": extend_periodic(base, 5),
        "arithmetic": extend_arithmetic(base, UNIT, c, 5),
        "cumulative": extend_cumulative(base, UNIT, c, 5),
    }
    dist = sphere_distance(UNIT)
    for made, traj in generated.items():
        rep = check_pattern(traj, base.period, made, dist)
        for kind in PATTERN_KINDS:
            assert rep.passed(1e-6, kind) == (kind == made), (made, kind, rep)


def test_checker_negative_control(rng):
    pts = np.cumsum(rng.normal(scale=0.2, size=(60, 3)), axis=0) + [0, 0, 3]
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    walk = GeoTrajectory(np.arange(60.0), pts)
    rep = check_pattern(walk, 12.0, "arithmetic", sphere_distance(UNIT))
    assert min(rep.periodic, rep.arithmetic, rep.cumulative) > 1e-3
    assert not any(rep.passed(1e-6, k) for k in PATTERN_KINDS)


def test_checker_errors(rng):
    base = base_on(UNIT, rng)
    traj = extend_periodic(base, 2)
    with pytest.raises(DataError, match=">= 3 periods"):
        check_pattern(traj, base.period, "periodic", sphere_distance(UNIT))
    three = extend_periodic(base, 3)
    jitter = three.times.copy()
    jitter[len(base) + 2] += 0.1
    with pytest.raises(DataError, match="misaligned"):
        check_pattern(GeoTrajectory(jitter, three.points), base.period, "periodic", sphere_distance(UNIT))
    with pytest.raises(ValueError):
        check_pattern(three, base.period, "helical", sphere_distance(UNIT))


def test_synth_demos():
    inf = synth_demo("infinity", UNIT, 40, 4)
    assert inf.period == 40.0
    assert check_pattern(inf, 40.0, "periodic", sphere_distance(UNIT)).periodic <= 1e-9
    spiral = synth_demo("spiral", UNIT, 40, 5, dt=2.0)
    assert check_pattern(spiral, 80.0, "cumulative", sphere_distance(UNIT)).passed(1e-6)
    c = synth_demo("c_shape", UNIT, 30, 2)
    assert c.period is None and len(c) == 60
    for traj in (inf, spiral, c):
        np.testing.assert_allclose(np.linalg.norm(traj.points, axis=1), 1.0, atol=1e-12)
    with pytest.raises(ValueError):
        synth_demo("heart", UNIT, 10, 1)
    with pytest.raises(ValueError):
        synth_demo("infinity", UNIT, 0, 1)


def test_check_with_atlas_distance():
    spiral = synth_demo("spiral", UNIT, 24, 4)
    atlas = build_atlas(cap_cloud(UNIT, spiral.points.mean(axis=0), 3000, np.random.default_rng(0)))
    rep = check_pattern(spiral, 24.0, "cumulative", lambda a, b: geodesic_distance(atlas, a, b))
    assert rep.passed(1e-6)


def test_cap_cloud(rng):
    s = Sphere([1.0, 2.0, 3.0], 2.0)
    pts = cap_cloud(s, [0, 1, 1], 500, rng, 0.3)
    np.testing.assert_allclose(np.linalg.norm(pts - s.center, axis=1), 2.0, rtol=1e-12)
    axis = np.array([0, 1, 1]) / np.sqrt(2)
    assert np.all((pts - s.center) @ axis / 2.0 >= np.cos(0.3) - 1e-12)
