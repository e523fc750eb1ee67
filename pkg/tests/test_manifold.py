import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from geotraj.errors import GeometryError
from geotraj.manifold import (
    Sphere,
    exp_map,
    great_circle_distance,
    log_map,
    parallel_transport,
    project_tangent,
)

coord = st.floats(-5, 5)
vec3 = st.tuples(coord, coord, coord).map(np.array)
spheres = st.builds(lambda c, r: Sphere(c, r), vec3, st.floats(0.1, 10))
directions = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).map(np.array).filter(
    lambda v: np.linalg.norm(v) > 0.1
)


def on_sphere(s, d):
    return s.center + s.radius * d / np.linalg.norm(d)


def rotation_oracle(s, base, vec):
    """Rotate ``base`` about the axis (base - O) x vec by the angle |vec| / r."""
    axis = np.cross(base - s.center, vec)
    axis /= np.linalg.norm(axis)
    rot = Rotation.from_rotvec(axis * np.linalg.norm(vec) / s.radius)
    return s.center + rot.apply(base - s.center)


def test_sphere_validation():
    with pytest.raises(ValueError):
        Sphere(np.zeros(3), 0.0)
    with pytest.raises(ValueError):
        Sphere(np.zeros(3), -1.0)


def test_exp_examples(unit_sphere):
    np.testing.assert_allclose(exp_map(unit_sphere, [1, 0, 0], [0, np.pi / 2, 0]), [0, 1, 0], atol=1e-15)
    np.testing.assert_array_equal(exp_map(unit_sphere, [1, 0, 0], [0, 0, 0]), [1, 0, 0])
    s2 = Sphere(np.zeros(3), 2.0)
    got = exp_map(s2, [2, 0, 0], [0, np.pi, 0])
    np.testing.assert_allclose(got, [0, 2, 0], atol=1e-15)
    np.testing.assert_allclose(got, rotation_oracle(s2, np.array([2.0, 0, 0]), np.array([0, np.pi, 0])), atol=1e-14)


def test_exp_rejects_off_sphere_and_radial(unit_sphere):
    with pytest.raises(GeometryError):
        exp_map(unit_sphere, [1.1, 0, 0], [0, 1, 0])
    with pytest.raises(GeometryError):
        exp_map(unit_sphere, [1, 0, 0], [1, 0, 0])


@given(spheres, directions, directions, st.floats(0.01, 3.0))
def test_exp_matches_rotation_oracle(s, d, v, angle):
    base = on_sphere(s, d)
    tan = project_tangent(s, base, v)
    assume(np.linalg.norm(tan) > 1e-3)
    tan *= angle * s.radius / np.linalg.norm(tan)
    got = exp_map(s, base, tan)
    np.testing.assert_allclose(got, rotation_oracle(s, base, tan), atol=1e-9 * (s.radius + np.abs(s.center).max()))
    assert s.contains(got, rtol=1e-9)


def test_log_examples(unit_sphere):
    np.testing.assert_array_equal(log_map(unit_sphere, [0, 0, 1], [0, 0, 1]), 0.0)
    np.testing.assert_allclose(log_map(unit_sphere, [1, 0, 0], [0, 1, 0]), [0, np.pi / 2, 0], atol=1e-15)
    with pytest.raises(GeometryError, match="cut locus"):
        log_map(unit_sphere, [1, 0, 0], [-1, 0, 0])


@given(spheres, directions, directions, st.floats(0.0, 0.9 * np.pi))
def test_exp_log_inverse(s, d, v, angle):
    base = on_sphere(s, d)
    tan = project_tangent(s, base, v)
    assume(np.linalg.norm(tan) > 1e-3)
    tan *= angle * s.radius / np.linalg.norm(tan)
    back = log_map(s, base, exp_map(s, base, tan))
    np.testing.assert_allclose(back, tan, atol=1e-8 * max(s.radius, np.linalg.norm(tan)))


@given(spheres, directions, directions)
def test_log_exp_round_trip_and_norm(s, d1, d2):
    a, b = on_sphere(s, d1), on_sphere(s, d2)
    dist = great_circle_distance(s, a, b)
    assume(dist < s.radius * (np.pi - 1e-3))
    v = log_map(s, a, b)
    assert np.linalg.norm(v) == pytest.approx(dist, rel=1e-9, abs=1e-12)
    np.testing.assert_allclose(exp_map(s, a, v), b, atol=1e-8 * (s.radius + np.abs(s.center).max()))


def test_project_examples(unit_sphere):
    np.testing.assert_array_equal(project_tangent(unit_sphere, [1, 0, 0], [0, 2, 3]), [0, 2, 3])
    np.testing.assert_array_equal(project_tangent(unit_sphere, [1, 0, 0], [4, 0, 0]), [0, 0, 0])
    np.testing.assert_array_equal(project_tangent(unit_sphere, [1, 0, 0], [1, 1, 0]), [0, 1, 0])


@given(spheres, directions, vec3)
def test_projector_idempotent_and_tangent(s, d, v):
    base = on_sphere(s, d)
    p1 = project_tangent(s, base, v)
    np.testing.assert_allclose(project_tangent(s, base, p1), p1, atol=1e-12 * max(1.0, np.linalg.norm(v)))
    assert abs(p1 @ (base - s.center)) <= 1e-9 * max(np.linalg.norm(v), 1e-12) * s.radius + 1e-12
    assert np.linalg.norm(p1) <= np.linalg.norm(v) * (1 + 1e-12)


def test_transport_examples(unit_sphere):
    v = np.array([0.0, 0.3, 0.7])
    np.testing.assert_array_equal(parallel_transport(unit_sphere, [1, 0, 0], [1, 0, 0], v), v)
    got = parallel_transport(unit_sphere, [1, 0, 0], [0, 1, 0], [0, 0, 2.5])
    np.testing.assert_allclose(got, [0, 0, 2.5], atol=1e-15)
    # the in-plane tangent (0, 1, 0) at (1, 0, 0) turns into (-1, 0, 0) at (0, 1, 0)
    got = parallel_transport(unit_sphere, [1, 0, 0], [0, 1, 0], [0, 1, 0])
    np.testing.assert_allclose(got, [-1, 0, 0], atol=1e-15)
    with pytest.raises(GeometryError):
        parallel_transport(unit_sphere, [1, 0, 0], [-1, 0, 0], [0, 1, 0])


@given(spheres, directions, directions, vec3)
def test_transport_isometry_tangency_and_rotation_oracle(s, d1, d2, v):
    a, b = on_sphere(s, d1), on_sphere(s, d2)
    ua, ub = (a - s.center) / s.radius, (b - s.center) / s.radius
    cos = ua @ ub
    assume(-0.999 < cos < 0.999999)
    va = project_tangent(s, a, v)
    got = parallel_transport(s, a, b, va)
    scale = max(np.linalg.norm(v), 1e-12)
    assert np.linalg.norm(got) == pytest.approx(np.linalg.norm(va), rel=1e-10, abs=1e-12)
    assert abs(got @ ub) <= 1e-9 * scale
    # along a great circle, transport is the rotation carrying a to b
    axis = np.cross(ua, ub)
    rot = Rotation.from_rotvec(axis / np.linalg.norm(axis) * np.arccos(np.clip(cos, -1, 1)))
    np.testing.assert_allclose(got, rot.apply(va), atol=1e-7 * scale)


def test_distance_examples(unit_sphere):
    assert great_circle_distance(unit_sphere, [0, 0, 1], [0, 0, 1]) == 0.0
    assert great_circle_distance(unit_sphere, [1, 0, 0], [0, 1, 0]) == pytest.approx(np.pi / 2, rel=1e-15)
    s3 = Sphere([1, 2, 3], 3.0)
    assert great_circle_distance(s3, [4, 2, 3], [-2, 2, 3]) == pytest.approx(3 * np.pi, rel=1e-15)


@given(spheres, directions, directions)
def test_distance_symmetry_and_range(s, d1, d2):
    a, b = on_sphere(s, d1), on_sphere(s, d2)
    dab = great_circle_distance(s, a, b)
    assert dab == great_circle_distance(s, b, a)
    assert 0.0 <= dab <= np.pi * s.radius
    assert great_circle_distance(s, a, a) == 0.0
