#!/usr/bin/env python3
"""Spherelet geodesic distance against the mesh Dijkstra oracle on the
two-bump height field, for a range of grid refinements.

For each ``n`` the atlas uses ``n`` vertical and ``n`` horizontal lines
spread over the projected bounding box. Prints the worst and mean relative
error, failed pairs (paths through unfitted cells) and the per-query speedup.
"""

import argparse
import sys
import time
import warnings

import numpy as np

from geotraj.errors import GeometryError
from geotraj.oracle import HeightFieldMesh, mesh_dijkstra_oracle, two_bump_cloud
from geotraj.spherelets import GridSpec, build_atlas, geodesic_distance, projection_plane


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lines", type=int, nargs="*", default=[0, 1, 2, 3, 4, 5, 8])
    ap.add_argument("--resolution", type=int, default=200)
    ap.add_argument("--stencil", type=int, default=3, help="1: 8 neighbours, 2: 16, 3: 32")
    ap.add_argument("--pairs", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    xs, Z, cloud = two_bump_cloud(args.resolution)
    mesh = HeightFieldMesh.from_grid(xs, xs, Z, stencil=args.stencil)
    plane = projection_plane(cloud)
    uv = plane.to_plane(cloud)
    rng = np.random.default_rng(args.seed)
    idx = rng.integers(0, args.resolution, (args.pairs, 2, 2))
    pairs = [
        (np.array([xs[i], xs[j], Z[i, j]]), np.array([xs[k], xs[l], Z[k, l]]))
        for (i, j), (k, l) in idx
    ]
    t0 = time.perf_counter()
    ref = [mesh_dijkstra_oracle(mesh, a, b) for a, b in pairs]
    t_oracle = (time.perf_counter() - t0) / len(pairs)

    print(f"oracle: {args.resolution}^2 mesh, stencil {args.stencil}, {1e3 * t_oracle:.2f} ms/query")
    print(f"{'lines':>5} {'cells':>5} {'max err':>8} {'mean err':>9} {'failed':>6} {'ms/query':>9} {'speedup':>8}")
    for n in args.lines:
        grid = GridSpec.uniform(n, n, uv.min(axis=0), uv.max(axis=0))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # empty or ill-posed cells
            atlas = build_atlas(cloud, grid, plane)
        errs, fails = [], 0
        t0 = time.perf_counter()
        for (a, b), r in zip(pairs, ref):
            try:
                d = geodesic_distance(atlas, a, b)
            except GeometryError:
                fails += 1
                continue
            errs.append(abs(d - r) / r if r > 0 else d)
        t_sph = (time.perf_counter() - t0) / len(pairs)
        errs = np.array(errs) if errs else np.array([np.nan])
        print(
            f"{n:5d} {(n + 1) ** 2:5d} {errs.max():8.2%} {errs.mean():9.2%} {fails:6d} "
            f"{1e3 * t_sph:9.3f} {t_oracle / t_sph:7.0f}x"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
