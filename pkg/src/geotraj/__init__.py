"""Learning rhythmic trajectories on curved surfaces.

Kernel ridge regression over time gives score functions ``alpha(t)``; a
surface built from local spheres ("spherelets") supplies geodesic
distances; predictions minimize the alpha-weighted squared distance by
Riemannian gradient descent.
"""

from .decoder import DecoderConfig, Prediction, imitate, minimize, predict
from .errors import ConfigError, DataError, GeometryError, NumericalError
from .kernels import KernelSpec, cross_vector, eval_kernel, gram
from .manifold import Sphere, exp_map, great_circle_distance, log_map, parallel_transport
from .metrics import EvalReport, evaluate, generalization_error, reproduction_error
from .patterns import check_pattern, extend_arithmetic, extend_cumulative, extend_periodic, synth_demo
from .scores import ScoreModel, scores, train
from .spherelets import GridSpec, SurfaceAtlas, build_atlas, fit_spherelet, geodesic_distance
from .trajectory import GeoTrajectory

__version__ = "0.1.0"
