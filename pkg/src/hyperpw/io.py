"""CSV and JSON formats and run configuration.

Floats are written with 17 significant digits, so files round-trip exactly
and identical runs produce byte-identical output.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .transform import (DEFAULT_C_P, REFERENCE, SpatialFunction, SpatialGrid,
                        SpectralFunction, SpectralGrid)

COORD_TOL = 1e-9


class ConfigError(ValueError):
    """Invalid configuration or input file contents."""


def fmt(x: float) -> str:
    return "%.17g" % x


def _open_csv(path):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"input file not found: {path}")
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))


def _require_columns(rows, cols, path):
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    missing = [c for c in cols if c not in rows[0]]
    if missing:
        raise ConfigError(f"{path}: missing columns {missing}")


def write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def csv_kind(path) -> str:
    """'spatial', 'spectral', 'samples' or 'lattice', judged from the header."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"input file not found: {path}")
    with path.open(newline="") as fh:
        header = next(csv.reader(fh), [])
    if "lambda_index" in header:
        return "spectral"
    if {"id", "x", "y", "re", "im"} <= set(header):
        return "samples"
    if {"x", "y", "re", "im"} <= set(header):
        return "spatial"
    if {"id", "x", "y"} <= set(header):
        return "lattice"
    raise ConfigError(f"{path}: unrecognized CSV header {header}")


# -- spatial / spectral functions -----------------------------------------------

def write_spatial_csv(path, f: SpatialFunction):
    z = f.grid.points.ravel()
    v = f.values.ravel()
    write_rows(path, ["x", "y", "re", "im"],
                ([fmt(a.real), fmt(a.imag), fmt(b.real), fmt(b.imag)] for a, b in zip(z, v)))


def read_spatial_csv(path, grid: SpatialGrid) -> SpatialFunction:
    rows = _open_csv(path)
    _require_columns(rows, ["x", "y", "re", "im"], path)
    z = np.array([complex(float(r["x"]), float(r["y"])) for r in rows])
    v = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    nodes = grid.points.ravel()
    if z.size != nodes.size or np.max(np.abs(z - nodes)) > COORD_TOL:
        raise ConfigError(f"{path}: points do not match the configured spatial grid "
                          f"(R={grid.R}, n_r={grid.n_r}, n_theta={grid.n_theta})")
    return SpatialFunction(v.reshape(grid.shape), grid)


def write_spectral_csv(path, F: SpectralFunction):
    g = F.grid
    tb = g.theta_b

    def rows():
        for i, lam in enumerate(g.lam):
            for k in range(g.n_b):
                v = F.values[i, k]
                yield [str(i), str(k), fmt(lam), fmt(tb[k]), fmt(v.real), fmt(v.imag)]
    write_rows(path, ["lambda_index", "b_index", "lambda", "theta_b", "re", "im"], rows())


def read_spectral_csv(path, grid: SpectralGrid) -> SpectralFunction:
    rows = _open_csv(path)
    _require_columns(rows, ["lambda_index", "b_index", "lambda", "theta_b", "re", "im"], path)
    vals = np.zeros(grid.shape, dtype=complex)
    seen = np.zeros(grid.shape, dtype=bool)
    for r in rows:
        i, k = int(r["lambda_index"]), int(r["b_index"])
        if not (0 <= i < grid.n_lambda and 0 <= k < grid.n_b):
            raise ConfigError(f"{path}: index ({i}, {k}) outside the configured spectral grid")
        if abs(float(r["lambda"]) - grid.lam[i]) > COORD_TOL:
            raise ConfigError(f"{path}: lambda at index {i} does not match the configured grid")
        vals[i, k] = complex(float(r["re"]), float(r["im"]))
        seen[i, k] = True
    if not seen.all():
        raise ConfigError(f"{path}: {int((~seen).sum())} spectral entries missing")
    return SpectralFunction(vals, grid)


# -- lattices, samples, weights ---------------------------------------------------

def write_lattice_csv(path, points):
    pts = np.asarray(points, dtype=complex)
    write_rows(path, ["id", "x", "y"],
                ([str(j), fmt(p.real), fmt(p.imag)] for j, p in enumerate(pts)))


def read_lattice_csv(path) -> np.ndarray:
    rows = _open_csv(path)
    _require_columns(rows, ["id", "x", "y"], path)
    rows.sort(key=lambda r: int(r["id"]))
    return np.array([complex(float(r["x"]), float(r["y"])) for r in rows])


def write_samples_csv(path, points, values):
    pts = np.asarray(points, dtype=complex)
    v = np.asarray(values, dtype=complex)
    write_rows(path, ["id", "x", "y", "re", "im"],
                ([str(j), fmt(p.real), fmt(p.imag), fmt(a.real), fmt(a.imag)]
                 for j, (p, a) in enumerate(zip(pts, v))))


def read_samples_csv(path):
    rows = _open_csv(path)
    _require_columns(rows, ["id", "x", "y", "re", "im"], path)
    rows.sort(key=lambda r: int(r["id"]))
    pts = np.array([complex(float(r["x"]), float(r["y"])) for r in rows])
    vals = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    return pts, vals


def write_weights_csv(path, weights):
    w = np.asarray(weights, dtype=complex)
    write_rows(path, ["id", "re", "im"],
                ([str(j), fmt(a.real), fmt(a.imag)] for j, a in enumerate(w)))


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


# -- configuration ----------------------------------------------------------------

@dataclass
class RunConfig:
    Lambda_max: float = REFERENCE["Lambda_max"]
    n_lambda: int = REFERENCE["n_lambda"]
    n_b: int = REFERENCE["n_b"]
    R: float = REFERENCE["R"]
    n_r: int = REFERENCE["n_r"]
    n_theta: int = REFERENCE["n_theta"]
    c_P: float = DEFAULT_C_P
    tol: float = 1e-6
    omega: float = 4.0
    omegas: list = field(default_factory=lambda: [2.0, 4.0, 8.0])
    lattice: dict = field(default_factory=dict)     # {"R": .., "r": ..} or {"c": ..}
    solver: dict = field(default_factory=dict)      # {"tol": .., "max_iter": ..}
    region: dict = field(default_factory=lambda: {"kind": "ball", "center": [0.0, 0.0],
                                                  "radius": 4.0})
    rates: dict = field(default_factory=dict)       # {"alpha": .., "omegas": [..]}
    besov: dict = field(default_factory=dict)       # {"alpha": .., "q": .., "r": ..}
    seed: int = 0
    paths: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(d) - set(known))
        if unknown:
            raise ConfigError(f"unknown configuration keys: {unknown}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        if path is None:
            return cls()
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"config file not found: {path}")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(data)

    def validate(self):
        try:
            for name in ("Lambda_max", "R", "c_P", "tol", "omega"):
                v = float(getattr(self, name))
                if not (math.isfinite(v) and v > 0):
                    raise ConfigError(f"{name} must be a positive number")
                setattr(self, name, v)
            for name in ("n_lambda", "n_b", "n_r", "n_theta", "seed"):
                v = getattr(self, name)
                if isinstance(v, bool) or int(v) != v:
                    raise ConfigError(f"{name} must be an integer")
                setattr(self, name, int(v))
            self.omegas = [float(w) for w in self.omegas]
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc
        for name in ("lattice", "solver", "region", "rates", "besov", "paths"):
            if not isinstance(getattr(self, name), dict):
                raise ConfigError(f"{name} must be a JSON object")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}
