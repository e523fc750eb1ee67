"""Command-line interface.

Every subcommand reads an optional ``--config`` file and then applies
per-key overrides (``--kernel.type qp``, ``--lambda 0.01``, ...). Angles
are in radians and lengths in the units of the input files.

Exit codes: 0 success, 2 configuration error, 3 input-data error,
4 numerical or geometric failure.
"""

from __future__ import annotations

import argparse
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import io
from .decoder import imitate
from .errors import ConfigError, DataError, GeometryError, NumericalError
from .manifold import Sphere
from .metrics import evaluate, unit_sphere_distance
from .oracle import HeightFieldMesh, mesh_dijkstra_oracle
from .patterns import PATTERN_KINDS, cap_cloud, check_pattern, sphere_distance, synth_demo
from .spherelets import build_atlas, fit_spherelet, geodesic_distance, projection_plane
from .trajectory import GeoTrajectory

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

SUBCOMMANDS = {
    "fit-atlas": "fit spherelets to a point cloud and print the atlas summary",
    "imitate": "learn from a demonstration and predict at the query times",
    "gen-demo": "write a synthetic demonstration and a matching surface cloud",
    "bench-geodesic": "compare spherelet distances with the mesh shortest-path oracle",
    "check-pattern": "test a trajectory for periodic / arithmetic / cumulative structure",
    "evaluate": "score a predicted trajectory against the demonstration",
}


def _out_dir(cfg: io.RunConfig) -> Path:
    out = cfg.path("out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_atlas(cfg: io.RunConfig):
    cloud = io.parse_cloud(cfg.input_path("cloud"))
    if cloud.shape[0] < 4:
        raise DataError("point cloud needs at least 4 points")
    plane = projection_plane(cloud)
    grid = cfg.grid(plane.to_plane(cloud))
    return cloud, build_atlas(cloud, grid, plane)


def _distance(cfg: io.RunConfig, atlas=None):
    kind = cfg.distance_kind()
    if kind == "sphere_arccos":
        return kind, unit_sphere_distance
    if kind == "euclidean":
        return kind, lambda a, b: float(np.linalg.norm(np.asarray(a) - np.asarray(b)))
    if atlas is None:
        _, atlas = _load_atlas(cfg)
    return kind, lambda a, b: geodesic_distance(atlas, a, b)


def cmd_fit_atlas(cfg: io.RunConfig) -> dict:
    _, atlas = _load_atlas(cfg)
    doc = atlas.summary()
    io.write_json(doc, _out_dir(cfg) / "atlas.json")
    return doc


def cmd_imitate(cfg: io.RunConfig) -> dict:
    demo = io.parse_trajectory(cfg.input_path("demo"))
    n = cfg.train_count(len(demo))
    kernel, lam, dcfg = cfg.kernel(), cfg.lam(), cfg.decoder()
    queries = cfg.queries(demo.times)
    _, atlas = _load_atlas(cfg)
    pred, preds = imitate(demo.head(n), kernel, lam, atlas, queries, dcfg, return_predictions=True)

    out = _out_dir(cfg)
    io.write_trajectory(pred, out / "prediction.csv")
    lines = ["t,objective_value,iterations_used,converged"]
    for p in preds:
        lines.append(f"{io.format_float(p.time)},{io.format_float(p.objective_value)},{p.iterations_used},{int(p.converged)}")
    (out / "decoder.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    doc = {
        "prediction": str(out / "prediction.csv"),
        "n_train": n,
        "n_queries": len(queries),
        "not_converged": sum(not p.converged for p in preds),
        "report": None,
    }
    # score the queries that coincide with demonstration samples
    idx = np.searchsorted(demo.times, queries)
    idx = np.minimum(idx, len(demo) - 1)
    hit = np.abs(demo.times[idx] - queries) <= 1e-9 * np.maximum(1.0, np.abs(queries))
    n_hit_train = int(np.sum(hit & (queries <= demo.times[n - 1])))
    if n_hit_train > 0:
        kind, dist = _distance(cfg, atlas)
        truth = GeoTrajectory(demo.times[idx[hit]], demo.points[idx[hit]])
        sub = GeoTrajectory(queries[hit], pred.points[hit])
        report = evaluate(sub, truth, n_hit_train, dist, kind)
        (out / "report.json").write_text(report.to_json() + "\n", encoding="utf-8")
        doc["report"] = str(out / "report.json")
        doc["c_t"], doc["c_g"] = report.c_t, report.c_g
    else:
        print("no query falls on a training sample; report skipped", file=sys.stderr)
    return doc


def cmd_gen_demo(cfg: io.RunConfig) -> dict:
    if cfg["gen.radius"] <= 0:
        raise ConfigError("gen.radius must be > 0")
    sphere = Sphere(np.zeros(3), cfg["gen.radius"])
    try:
        demo = synth_demo(cfg["gen.shape"], sphere, cfg["gen.n_samples"], cfg["gen.n_periods"], cfg["gen.dt"])
    except GeometryError:
        raise
    except ValueError as exc:  # bad shape name or sample counts
        raise ConfigError(f"gen: {exc}") from None
    if cfg["gen.cloud_points"] < 4:
        raise ConfigError("gen.cloud_points must be >= 4")
    rng = np.random.default_rng(cfg["gen.seed"])
    cloud = cap_cloud(sphere, demo.points.mean(axis=0), cfg["gen.cloud_points"], rng)
    out = _out_dir(cfg)
    io.write_trajectory(demo, out / "demo.csv")
    io.write_cloud(cloud, out / "cloud.xyz")
    return {
        "demo": str(out / "demo.csv"),
        "cloud": str(out / "cloud.xyz"),
        "samples": len(demo),
        "period": demo.period,
    }


def cmd_bench_geodesic(cfg: io.RunConfig) -> dict:
    cloud, atlas = _load_atlas(cfg)
    if cfg["bench.pairs"] < 1 or cfg["bench.resolution"] < 2 or cfg["bench.stencil"] < 1:
        raise ConfigError("bench.pairs >= 1, bench.resolution >= 2 and bench.stencil >= 1 required")
    mesh = HeightFieldMesh.from_cloud(cloud, cfg["bench.resolution"], atlas.plane, cfg["bench.stencil"])
    # endpoints are mesh vertices, so the oracle needs no snapping
    rng = np.random.default_rng(cfg["bench.seed"])
    valid = np.flatnonzero(np.isfinite(mesh.heights).ravel())
    pairs = rng.choice(valid, size=(cfg["bench.pairs"], 2), replace=True)
    verts = mesh.vertices.reshape(-1, 3)
    rows = []
    lines = ["pair,spherelet_distance,oracle_distance,relative_error,spherelet_time,oracle_time"]
    for k, (i, j) in enumerate(pairs):
        a, b = atlas.relift(verts[i]), atlas.relift(verts[j])
        t0 = time.perf_counter()
        d = geodesic_distance(atlas, a, b)
        t1 = time.perf_counter()
        ref = mesh_dijkstra_oracle(mesh, a, b)
        t2 = time.perf_counter()
        rel = abs(d - ref) / ref if ref > 0 else abs(d)
        rows.append((d, ref, rel, t1 - t0, t2 - t1))
        lines.append(",".join([str(k)] + [io.format_float(v) for v in rows[-1]]))
    out = _out_dir(cfg)
    (out / "bench.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    arr = np.array(rows)
    return {
        "bench": str(out / "bench.csv"),
        "pairs": len(rows),
        "max_relative_error": float(arr[:, 2].max()),
        "mean_relative_error": float(arr[:, 2].mean()),
        "spherelet_time_median": float(np.median(arr[:, 3])),
        "oracle_time_median": float(np.median(arr[:, 4])),
        "speedup": float(arr[:, 4].sum() / arr[:, 3].sum()),
    }


def cmd_check_pattern(cfg: io.RunConfig) -> dict:
    traj = io.parse_trajectory(cfg.input_path("demo"))
    kind = cfg["pattern.kind"]
    if kind not in PATTERN_KINDS:
        raise ConfigError(f"pattern.kind must be one of {', '.join(PATTERN_KINDS)}")
    if not cfg["pattern.period"] > 0:
        raise ConfigError("pattern.period must be > 0")
    if cfg["cloud"]:
        _, atlas = _load_atlas(cfg)
        dist, dist_kind = (lambda a, b: geodesic_distance(atlas, a, b)), "atlas_geodesic"
    else:
        # no surface given: the trajectory is assumed to lie on one sphere
        dist, dist_kind = sphere_distance(fit_spherelet(traj.points)), "fitted_sphere"
    report = check_pattern(traj, cfg["pattern.period"], kind, dist)
    doc = report.to_dict()
    doc["distance_kind"] = dist_kind
    doc["tol"] = cfg["pattern.tol"]
    doc["passed"] = report.passed(cfg["pattern.tol"])
    io.write_json(doc, _out_dir(cfg) / "pattern.json")
    return doc


def cmd_evaluate(cfg: io.RunConfig) -> dict:
    pred = io.parse_trajectory(cfg.input_path("prediction"))
    truth = io.parse_trajectory(cfg.input_path("demo"))
    kind, dist = _distance(cfg)
    report = evaluate(pred, truth, cfg.train_count(len(truth)), dist, kind)
    out = _out_dir(cfg)
    (out / "report.json").write_text(report.to_json() + "\n", encoding="utf-8")
    return {"report": str(out / "report.json"), "c_t": report.c_t, "c_g": report.c_g}


COMMANDS = {
    "fit-atlas": cmd_fit_atlas,
    "imitate": cmd_imitate,
    "gen-demo": cmd_gen_demo,
    "bench-geodesic": cmd_bench_geodesic,
    "check-pattern": cmd_check_pattern,
    "evaluate": cmd_evaluate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geotraj",
        description="Learn (quasi-)periodic trajectories on curved surfaces. "
        "Angles are in radians, lengths in the units of the input files.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, help_text in SUBCOMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", metavar="PATH", help="key = value config file")
        for key, (conv, default) in io.CONFIG_KEYS.items():
            p.add_argument(f"--{key}", dest=key, metavar=conv.__name__.upper(), default=None,
                           help=f"default: {default!r}" if default not in (None, "") else None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = _warn_to_stderr
            cfg = io.RunConfig.from_sources(config_path, args)
            doc = COMMANDS[command](cfg)
    except ConfigError as exc:
        return _fail(exc, EXIT_CONFIG)
    except (DataError, OSError) as exc:
        return _fail(exc, EXIT_DATA)
    except (GeometryError, NumericalError) as exc:
        return _fail(exc, EXIT_NUMERIC)
    sys.stdout.write(io.dumps_json(doc))
    return EXIT_OK


def _warn_to_stderr(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def _fail(exc: Exception, code: int) -> int:
    print(f"geotraj: error: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
