"""File formats and run configuration.

Trajectories are CSV with header ``t,x,y,z``. Point clouds are either
whitespace-separated XYZ (``#`` starts a comment) or CSV with header
``x,y,z``; the format is picked from the file extension.

Run configuration is a flat ``key = value`` file. Keys before any section
header are top-level; ``[kernel]``, ``[decoder]``, ``[grid]`` etc. prefix
their keys, so ``type`` under ``[kernel]`` is addressed as ``kernel.type``
both in code and as a command-line override.
"""

from __future__ import annotations

import configparser
import csv
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .decoder import INIT_STRATEGIES, DecoderConfig
from .errors import ConfigError, DataError
from .kernels import KernelSpec
from .spherelets import GridSpec
from .trajectory import GeoTrajectory

TRAJECTORY_HEADER = ("t", "x", "y", "z")
CLOUD_HEADER = ("x", "y", "z")


def format_float(x: float) -> str:
    return format(float(x), ".17g")


# --------------------------------------------------------------------------
# trajectories


def parse_trajectory(path) -> GeoTrajectory:
    """Read a ``t,x,y,z`` CSV.

    Rows are sorted by time if needed (with a warning). A repeated timestamp
    is dropped when its row is identical to the earlier one and rejected
    otherwise.
    """
    path = Path(path)
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = None
        for lineno, rec in enumerate(reader, start=1):
            if not rec or all(not c.strip() for c in rec):
                continue
            if header is None:
                header = tuple(c.strip().lower() for c in rec)
                if header != TRAJECTORY_HEADER:
                    raise DataError(f"{path}:{lineno}: expected header 't,x,y,z', got {','.join(rec)!r}")
                continue
            if len(rec) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 fields, got {len(rec)}")
            try:
                vals = [float(c) for c in rec]
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric field in {','.join(rec)!r}") from None
            if not all(math.isfinite(v) for v in vals):
                raise DataError(f"{path}:{lineno}: non-finite value")
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no trajectory samples")
    data = np.array(rows)
    order = np.argsort(data[:, 0], kind="stable")
    if np.any(order != np.arange(len(order))):
        warnings.warn(f"{path}: rows not in time order; sorted", stacklevel=2)
        data = data[order]
    same_t = np.diff(data[:, 0]) == 0
    if same_t.any():
        same_row = np.all(data[1:] == data[:-1], axis=1)
        if np.any(same_t & ~same_row):
            t = float(data[1:, 0][same_t & ~same_row][0])
            raise DataError(f"{path}: conflicting samples at t = {format_float(t)}")
        data = data[np.concatenate([[True], ~same_t])]
    return GeoTrajectory(data[:, 0], data[:, 1:])


def write_trajectory(traj: GeoTrajectory, path) -> None:
    lines = [",".join(TRAJECTORY_HEADER)]
    for t, p in zip(traj.times, traj.points):
        lines.append(",".join(format_float(v) for v in (t, *p)))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# --------------------------------------------------------------------------
# point clouds


def parse_cloud(path) -> np.ndarray:
    """Point cloud as an ``(n, 3)`` array; ``.csv`` files need an ``x,y,z`` header."""
    path = Path(path)
    is_csv = path.suffix.lower() == ".csv"
    pts = []
    seen_header = False
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if is_csv:
                tokens = [c.strip() for c in body.split(",")]
                if not seen_header:
                    if tuple(c.lower() for c in tokens) != CLOUD_HEADER:
                        raise DataError(f"{path}:{lineno}: expected header 'x,y,z'")
                    seen_header = True
                    continue
            else:
                tokens = body.split()
            if len(tokens) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 coordinates, got {len(tokens)}")
            try:
                xyz = [float(tok) for tok in tokens]
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric token in {body!r}") from None
            if not all(math.isfinite(v) for v in xyz):
                raise DataError(f"{path}:{lineno}: non-finite coordinate")
            pts.append(xyz)
    if not pts:
        raise DataError(f"{path}: no points")
    return np.array(pts)


def write_cloud(points, path) -> None:
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    path = Path(path)
    if path.suffix.lower() == ".csv":
        lines = [",".join(CLOUD_HEADER)] + [",".join(format_float(v) for v in p) for p in pts]
    else:
        lines = [" ".join(format_float(v) for v in p) for p in pts]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_json(doc, path) -> None:
    Path(path).write_text(dumps_json(doc), encoding="utf-8")


def dumps_json(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


# --------------------------------------------------------------------------
# configuration

# key -> (parser, default); None default means "required by the commands that use it"
CONFIG_KEYS = {
    "kernel.type": (str, "se"),
    "kernel.sigma_s": (float, 5.0),
    "kernel.l_s": (float, 20.0),
    "kernel.sigma_p": (float, 1.0),
    "kernel.l_p": (float, 0.5),
    "kernel.period": (float, 150.0),
    "lambda": (float, 0.01),
    "decoder.step_size": (float, 0.1),
    "decoder.max_iterations": (int, 500),
    "decoder.gradient_tolerance": (float, 1e-8),
    "decoder.init_strategy": (str, "previous_prediction"),
    "decoder.line_search": (str, "on"),
    "grid.nv": (int, 0),
    "grid.nh": (int, 0),
    "grid.vertical": (str, ""),
    "grid.horizontal": (str, ""),
    "cloud": (str, None),
    "demo": (str, None),
    "prediction": (str, None),
    "queries": (str, ""),
    "train": (str, "1.0"),
    "distance": (str, "sphere_arccos"),
    "out": (str, "out"),
    "gen.shape": (str, "infinity"),
    "gen.n_samples": (int, 150),
    "gen.n_periods": (int, 4),
    "gen.dt": (float, 1.0),
    "gen.radius": (float, 1.0),
    "gen.cloud_points": (int, 4000),
    "gen.seed": (int, 0),
    "pattern.kind": (str, "periodic"),
    "pattern.period": (float, 150.0),
    "pattern.tol": (float, 1e-6),
    "bench.pairs": (int, 50),
    "bench.seed": (int, 0),
    "bench.resolution": (int, 200),
    "bench.stencil": (int, 3),
}

DISTANCE_KINDS = ("sphere_arccos", "atlas_geodesic", "euclidean")
_ON = {"on", "true", "yes", "1"}
_OFF = {"off", "false", "no", "0"}


def read_config_file(path) -> dict[str, str]:
    """Flatten a config file to ``{"section.key": raw string}``."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    cp = configparser.ConfigParser(interpolation=None, default_section="\0none")
    cp.optionxform = str
    try:
        cp.read_string("[\0top]\n" + text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    flat = {}
    for section in cp.sections():
        for key, value in cp.items(section):
            name = key if section == "\0top" else f"{section}.{key}"
            flat[name.lower()] = value
    return flat


@dataclass
class RunConfig:
    """Validated settings for one CLI run.

    Relative paths read from a config file resolve against that file's
    directory; relative paths given as overrides resolve against the
    working directory.
    """

    values: dict
    file_keys: frozenset = frozenset()
    base_dir: Path | None = None

    @classmethod
    def from_sources(cls, path=None, overrides: dict | None = None) -> RunConfig:
        raw = read_config_file(path) if path is not None else {}
        file_keys = set(raw)
        given = {k: v for k, v in (overrides or {}).items() if v is not None}
        raw.update(given)
        file_keys -= set(given)
        unknown = sorted(set(raw) - set(CONFIG_KEYS))
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        values = {}
        for key, (conv, default) in CONFIG_KEYS.items():
            if key not in raw:
                values[key] = default
                continue
            text = str(raw[key]).strip()
            try:
                value = conv(text)
            except ValueError:
                raise ConfigError(f"{key}: cannot parse {text!r} as {conv.__name__}") from None
            if isinstance(value, float) and not math.isfinite(value):
                raise ConfigError(f"{key}: must be finite")
            values[key] = value
        base = Path(path).parent if path is not None else None
        return cls(values, frozenset(file_keys), base)

    def __getitem__(self, key):
        return self.values[key]

    def path(self, key: str) -> Path:
        value = self.values[key]
        if not value:
            raise ConfigError(f"missing required key {key!r}")
        p = Path(value)
        if not p.is_absolute() and key in self.file_keys and self.base_dir is not None:
            p = self.base_dir / p
        return p

    def input_path(self, key: str) -> Path:
        p = self.path(key)
        if not p.is_file():
            raise DataError(f"{key}: no such file {str(p)!r}")
        return p

    # ---- typed views

    def kernel(self) -> KernelSpec:
        kind = self["kernel.type"].lower()
        try:
            if kind == "se":
                return KernelSpec.se(self["kernel.sigma_s"], self["kernel.l_s"])
            if kind == "per":
                return KernelSpec.per(self["kernel.sigma_p"], self["kernel.l_p"], self["kernel.period"])
            if kind == "qp":
                return KernelSpec.qp(
                    self["kernel.sigma_s"], self["kernel.l_s"],
                    self["kernel.sigma_p"], self["kernel.l_p"], self["kernel.period"],
                )
        except ValueError as exc:
            raise ConfigError(f"kernel: {exc}") from None
        raise ConfigError(f"kernel.type must be se, per or qp, got {kind!r}")

    def lam(self) -> float:
        if not self["lambda"] > 0:
            raise ConfigError("lambda must be > 0")
        return self["lambda"]

    def decoder(self) -> DecoderConfig:
        ls = self["decoder.line_search"].lower()
        if ls not in _ON | _OFF:
            raise ConfigError(f"decoder.line_search must be on/off, got {ls!r}")
        if self["decoder.init_strategy"] not in INIT_STRATEGIES:
            raise ConfigError(f"decoder.init_strategy must be one of {', '.join(INIT_STRATEGIES)}")
        try:
            return DecoderConfig(
                step_size=self["decoder.step_size"],
                max_iterations=self["decoder.max_iterations"],
                gradient_tolerance=self["decoder.gradient_tolerance"],
                init_strategy=self["decoder.init_strategy"],
                line_search=ls in _ON,
            )
        except ValueError as exc:
            raise ConfigError(f"decoder: {exc}") from None

    def grid(self, uv) -> GridSpec:
        """Explicit lines win; otherwise ``nv x nh`` uniform lines over the bounding box of ``uv``."""
        try:
            vert = _float_list(self["grid.vertical"])
            horiz = _float_list(self["grid.horizontal"])
        except ValueError:
            raise ConfigError("grid.vertical / grid.horizontal must be comma-separated numbers") from None
        nv, nh = self["grid.nv"], self["grid.nh"]
        if nv < 0 or nh < 0:
            raise ConfigError("grid.nv and grid.nh must be >= 0")
        try:
            if vert or horiz:
                return GridSpec(tuple(vert), tuple(horiz))
            uv = np.asarray(uv, dtype=float)
            return GridSpec.uniform(nv, nh, uv.min(axis=0), uv.max(axis=0))
        except ValueError as exc:
            raise ConfigError(f"grid: {exc}") from None

    def queries(self, default_times) -> np.ndarray:
        text = self["queries"].strip()
        if not text:
            return np.asarray(default_times, dtype=float)
        try:
            return parse_queries(text)
        except ValueError as exc:
            raise ConfigError(f"queries: {exc}") from None

    def train_count(self, n_total: int) -> int:
        text = self["train"].strip()
        try:
            if "." in text or "e" in text.lower():
                frac = float(text)
                if not 0 < frac <= 1:
                    raise ValueError
                n = int(math.floor(frac * n_total))
            else:
                n = int(text)
        except ValueError:
            raise ConfigError(f"train must be a count or a fraction in (0, 1], got {text!r}") from None
        if not 1 <= n <= n_total:
            raise ConfigError(f"train selects {n} of {n_total} samples")
        return n

    def distance_kind(self) -> str:
        kind = self["distance"]
        if kind not in DISTANCE_KINDS:
            raise ConfigError(f"distance must be one of {', '.join(DISTANCE_KINDS)}")
        return kind


def _float_list(text: str) -> list[float]:
    text = text.strip()
    return [float(x) for x in text.split(",")] if text else []


def parse_queries(text: str) -> np.ndarray:
    """``"start:step:end"`` (end inclusive) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("range must be start:step:end")
        start, step, end = (float(p) for p in parts)
        if not all(math.isfinite(v) for v in (start, step, end)) or not step > 0 or end < start:
            raise ValueError("range needs finite start <= end and step > 0")
        count = int(math.floor((end - start) / step + 1e-9)) + 1
        return start + step * np.arange(count)
    vals = np.array([float(x) for x in text.split(",")])
    if not np.all(np.isfinite(vals)):
        raise ValueError("query times must be finite")
    if np.any(np.diff(vals) <= 0):
        raise ValueError("query times must be strictly increasing")
    return vals
