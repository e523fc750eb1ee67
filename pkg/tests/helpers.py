"""Small sampling helpers shared by the test modules."""

import numpy as np

from geotraj.manifold import Sphere
from geotraj.patterns import cap_cloud


def random_unit(rng, n=None):
    shape = (3,) if n is None else (n, 3)
    v = rng.normal(size=shape)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def cap_samples(rng, center, radius, axis, n, max_angle=np.pi / 2):
    """Uniform points of a spherical cap around ``axis`` on sphere (center, radius)."""
    return cap_cloud(Sphere(np.asarray(center, float), radius), axis, n, rng, max_angle)
