"""Metric (r, N)-lattices on truncated geodesic balls.

Points are chosen by greedy farthest-point insertion over a probe grid,
starting from the origin.  Every inserted point is more than r/2 from the
previous ones, and insertion stops once every probe point lies within r/2
of the set, so separation and covering hold by construction and are then
re-measured by :func:`verify_lattice`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .geometry import RHO, dist, polar_to_point

# Probe spacing as a fraction of r, and the coarsest spacing accepted.
PROBE_FRACTION = 1.0 / 6.0
MAX_PROBE_FRACTION = 0.25
MAX_PROBE_POINTS = 4_000_000
# Absolute rounding allowance in the separation and covering predicates.
CERT_SLACK = 1e-12


class LatticeError(ValueError):
    """Raised when a lattice cannot be built or certified."""


@dataclass(frozen=True, eq=False)
class ProbeGrid:
    """Near-uniform point cloud in the ball of radius R with spacing about h."""

    R: float
    h: float
    points: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.points)


def probe_grid(R: float, h: float, seed: int = 0) -> ProbeGrid:
    """Ring-adaptive probe cloud: concentric rings h apart, arc spacing at most h.

    Includes the origin and a ring on the boundary circle.  The seed only
    sets the angular offset of each ring.
    """
    if not (R > 0 and h > 0):
        raise LatticeError("probe grid needs R > 0 and h > 0")
    n_rings = max(1, math.ceil(R / h))
    radii = np.append((np.arange(n_rings) + 0.5) * R / n_rings, R)
    counts = [max(6, math.ceil(2 * np.pi * np.sinh(rk) / h)) for rk in radii]
    if sum(counts) > MAX_PROBE_POINTS:
        raise LatticeError(f"probe grid would need {sum(counts)} points; r is too small for R")
    rng = np.random.default_rng(seed)
    pts = [np.zeros(1, dtype=complex)]
    for rk, n in zip(radii, counts):
        offset = rng.uniform(0.0, 2 * np.pi / n) if seed else 0.0
        pts.append(polar_to_point(rk, offset + 2 * np.pi * np.arange(n) / n))
    return ProbeGrid(float(R), float(h), np.concatenate(pts))


@dataclass(frozen=True)
class Certificate:
    r: float
    R: float
    min_pairwise: float
    covering_radius: float
    multiplicity: int

    @property
    def separated(self) -> bool:
        return self.min_pairwise >= self.r / 2 - CERT_SLACK

    @property
    def covering(self) -> bool:
        return self.covering_radius <= self.r / 2 + CERT_SLACK

    def as_dict(self) -> dict:
        return {"r": self.r, "R": self.R, "min_pairwise": self.min_pairwise,
                "covering_radius": self.covering_radius, "multiplicity": self.multiplicity}


@dataclass(frozen=True, eq=False)
class Lattice:
    points: np.ndarray = field(repr=False)
    r: float
    R: float
    probe: ProbeGrid = field(repr=False)
    certificate: Certificate = None

    def __len__(self):
        return len(self.points)


def _hyperbolic_disk(p: np.ndarray, D: float):
    """Euclidean centre and radius of the hyperbolic ball B(p, D)."""
    t2 = math.tanh(D / 2) ** 2
    a2 = np.abs(p) ** 2
    centre = p * (1 - t2) / (1 - t2 * a2)
    radius = math.sqrt(t2) * (1 - a2) / (1 - t2 * a2)
    return np.column_stack([centre.real, centre.imag]), radius


def _neighbours(tree: cKDTree, pts: np.ndarray, p: np.ndarray, D: float):
    """Flattened (query index, point index, distance) for all pairs within D."""
    c, rad = _hyperbolic_disk(p, D)
    lists = tree.query_ball_point(c, rad * (1 + 1e-9) + 1e-15)
    counts = np.fromiter((len(v) for v in lists), dtype=int, count=len(lists))
    qi = np.repeat(np.arange(len(p)), counts)
    pj = np.fromiter((j for v in lists for j in v), dtype=int, count=int(counts.sum()))
    return qi, pj, dist(p[qi], pts[pj])


def _min_dist_to_set(probe: np.ndarray, pts: np.ndarray, tree: cKDTree, D: float) -> np.ndarray:
    """Distance from each probe point to the set; exact search beyond D."""
    out = np.full(len(probe), np.inf)
    qi, _, d = _neighbours(tree, pts, probe, D)
    np.minimum.at(out, qi, d)
    far = np.flatnonzero(~np.isfinite(out))
    for s in range(0, len(far), 64):
        blk = far[s:s + 64]
        out[blk] = dist(probe[blk, None], pts[None, :]).min(axis=1)
    return out


def build_lattice(R: float, r: float, seed: int = 0, probe: ProbeGrid = None) -> Lattice:
    """Greedy farthest-point (r/2)-separated, (r/2)-covering set in the ball of radius R."""
    if not (r > 0 and R > 0):
        raise LatticeError("need r > 0 and R > 0")
    if probe is None:
        probe = probe_grid(R, r * PROBE_FRACTION, seed)
    elif probe.h > MAX_PROBE_FRACTION * r:
        raise LatticeError(f"probe spacing {probe.h:.3g} is too coarse to certify r = {r:.3g}")
    P = probe.points
    # sinh^2(d/2) = |p-q|^2 / ((1-|p|^2)(1-|q|^2)) is increasing in d
    x, y = P.real.copy(), P.imag.copy()
    inv = 1.0 / (1.0 - (x * x + y * y))
    tree = cKDTree(np.column_stack([x, y]))
    chosen = [0j]
    mind = (x * x + y * y) * inv
    half = math.sinh(r / 4) ** 2
    while True:
        j = int(np.argmax(mind))  # lowest index among ties
        if mind[j] <= half:
            break
        chosen.append(P[j])
        # only probes closer to P[j] than the current maximum can change; the
        # hyperbolic metric dominates twice the Euclidean one
        reach = 2.0 * math.asinh(math.sqrt(mind[j]))
        idx = np.asarray(tree.query_ball_point((x[j], y[j]), 0.5 * reach + 1e-12), dtype=int)
        d2 = ((x[idx] - x[j]) ** 2 + (y[idx] - y[j]) ** 2) * (inv[idx] * inv[j])
        mind[idx] = np.minimum(mind[idx], d2)
    lat = Lattice(np.array(chosen), float(r), float(R), probe)
    return Lattice(lat.points, lat.r, lat.R, probe, verify_lattice(lat))


def verify_lattice(L: Lattice) -> Certificate:
    """Exact pairwise minimum; covering radius and multiplicity over the probe grid."""
    pts = np.asarray(L.points, dtype=complex)
    if len(pts) == 0:
        raise LatticeError("empty lattice")
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    if len(pts) > 1:
        qi, pj, d = _neighbours(tree, pts, pts, L.r)
        d = d[qi != pj]
        if len(d):
            min_pair = float(d.min())
        else:
            full = dist(pts[:, None], pts[None, :])
            np.fill_diagonal(full, np.inf)
            min_pair = float(full.min())
    else:
        min_pair = float("inf")
    P = L.probe.points
    cover = float(_min_dist_to_set(P, pts, tree, L.r / 2).max())
    qi, _, d = _neighbours(tree, pts, P, L.r)
    mult = int(np.bincount(qi[d <= L.r], minlength=len(P)).max())
    return Certificate(float(L.r), float(L.R), min_pair, cover, mult)


def nyquist_radius(omega: float, c: float) -> float:
    """Sampling radius r = c (omega^2 + rho^2)^(-1/2)."""
    if not (omega >= 0 and c > 0):
        raise ValueError("need omega >= 0 and c > 0")
    return c / math.sqrt(omega * omega + RHO * RHO)


def lattice_from_points(points, r: float, R: float, h: float = None) -> Lattice:
    """Wrap an arbitrary point set (e.g. read from a file) and certify it empirically."""
    pts = np.asarray(points, dtype=complex)
    probe = probe_grid(R, h if h is not None else r * PROBE_FRACTION)
    lat = Lattice(pts, float(r), float(R), probe)
    return Lattice(pts, lat.r, lat.R, probe, verify_lattice(lat))
