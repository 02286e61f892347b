"""Quadrature rules that are exact on band-limited functions.

Given a certified frame with dual spectra Theta_j, any band-limited f obeys
f = sum_j f(x_j) Theta_j, hence

    int_U f dx          = sum_j f(x_j) w_j,   w_j = int_U Theta_j dx,
    int_V f^ dmu        = sum_j f(x_j) v_j,   v_j = int_V Theta_j^ dmu.

U is a geodesic ball integrated with the nodes and weights of a spatial grid
(indicator at the nodes); V is a band lambda in [a, b) times the full circle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .frames import FrameSystem, sampling_kernel
from .geometry import check_in_disk, dist
from .transform import SpatialGrid


class RegionError(ValueError):
    """Region is not inside the represented domain or band."""


@dataclass(frozen=True)
class Ball:
    center: complex
    radius: float

    def as_dict(self) -> dict:
        c = complex(self.center)
        return {"kind": "ball", "center": [c.real, c.imag], "radius": self.radius}


@dataclass(frozen=True)
class Band:
    lo: float
    hi: float

    def as_dict(self) -> dict:
        return {"kind": "band", "lambda": [self.lo, self.hi]}


def region_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "ball":
        x, y = d["center"]
        return Ball(complex(x, y), float(d["radius"]))
    if kind == "band":
        a, b = d["lambda"]
        return Band(float(a), float(b))
    raise RegionError(f"unknown region kind {kind!r}")


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    weights: np.ndarray = field(repr=False)
    region: object
    kind: str

    def __len__(self):
        return len(self.weights)


def ball_mask(U: Ball, sgrid: SpatialGrid) -> np.ndarray:
    """Indicator of U at the nodes of ``sgrid``; U must lie inside the grid's ball."""
    c = check_in_disk(U.center)
    if not U.radius >= 0:
        raise RegionError("ball radius must be nonnegative")
    if float(dist(0j, c)) + U.radius > sgrid.R * (1 + 1e-12):
        raise RegionError(f"ball escapes the spatial grid of radius {sgrid.R}")
    return dist(sgrid.points, c) <= U.radius


def spatial_weights(U: Ball, frame: FrameSystem, sgrid: SpatialGrid) -> QuadratureRule:
    """w_j = integral over U of the dual function Theta_j."""
    mask = ball_mask(U, sgrid)
    nodes = sgrid.points[mask]
    wts = sgrid.weights[mask]
    E = frame.analysis
    # integral over U of each band column, including its Plancherel weight
    col = np.zeros(E.shape[1], dtype=complex)
    for s in range(0, nodes.size, 4096):
        K = sampling_kernel(nodes[s:s + 4096], E.grid, E.n_band)
        col += wts[s:s + 4096] @ K
    col *= E.weights
    return QuadratureRule(col @ frame.dual_matrix, U, "spatial")


def band_mask(V: Band, frame: FrameSystem) -> np.ndarray:
    if not (0 <= V.lo <= V.hi):
        raise RegionError("need 0 <= lo <= hi")
    if V.hi > frame.omega:
        raise RegionError(f"band [{V.lo}, {V.hi}) exceeds omega = {frame.omega}")
    lam = frame.grid.lam[: frame.analysis.n_band]
    return (lam >= V.lo) & (lam < V.hi)


def spectral_weights(V: Band, frame: FrameSystem) -> QuadratureRule:
    """v_j = integral of the dual spectrum Theta_j over lambda in [lo, hi)."""
    E = frame.analysis
    sel = np.repeat(band_mask(V, frame), E.grid.n_b)
    return QuadratureRule((E.weights * sel) @ frame.dual_matrix, V, "spectral")


def apply_rule(samples, rule: QuadratureRule) -> complex:
    y = np.asarray(samples, dtype=complex).ravel()
    if y.size != len(rule.weights):
        raise ValueError(f"expected {len(rule.weights)} samples, got {y.size}")
    return complex(y @ rule.weights)
