"""Hyperbolic geometry of the Poincare disk (curvature -1).

Functions accept scalars or numpy arrays of complex disk coordinates and
broadcast in the usual way.  :class:`DiskPoint` and :class:`BoundaryPoint`
are thin validated wrappers for the public API.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RHO = 0.5
# Points closer to the unit circle than this are rejected.
BOUNDARY_MARGIN = 1e-12


@dataclass(frozen=True)
class DiskPoint:
    z: complex

    def __post_init__(self):
        z = complex(self.z)
        if not np.isfinite(z.real) or not np.isfinite(z.imag):
            raise ValueError(f"non-finite disk coordinate {z!r}")
        if abs(z) > 1.0 - BOUNDARY_MARGIN:
            raise ValueError(f"|z| = {abs(z)!r} is not inside the unit disk")
        object.__setattr__(self, "z", z)

    def __complex__(self):
        return self.z


@dataclass(frozen=True)
class BoundaryPoint:
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta) % (2 * np.pi))

    @property
    def b(self) -> complex:
        return complex(np.exp(1j * self.theta))


@dataclass(frozen=True)
class ModelConstants:
    """Spectral shift and Plancherel normalization of the model."""

    c_P: float
    rho: float = RHO

    def __post_init__(self):
        if self.rho != RHO:
            raise ValueError("curvature is fixed to -1, so rho must be 0.5")
        if not self.c_P > 0:
            raise ValueError("c_P must be positive")


def _coord(p):
    if isinstance(p, DiskPoint):
        return p.z
    return np.asarray(p, dtype=complex)


def check_in_disk(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > 1.0 - BOUNDARY_MARGIN):
        raise ValueError("points must satisfy |z| <= 1 - 1e-12")
    return z


def dist(p, q):
    """Hyperbolic distance between disk points.

    arccosh(1 + 2|p-q|^2 / ((1-|p|^2)(1-|q|^2))), evaluated through the
    equivalent 2 asinh form, which keeps full relative accuracy for close points.
    """
    p, q = _coord(p), _coord(q)
    den = (1.0 - np.abs(p) ** 2) * (1.0 - np.abs(q) ** 2)
    return 2.0 * np.arcsinh(np.abs(p - q) / np.sqrt(den))


def busemann(p, b):
    """Horocyclic coordinate <z, b> = log((1 - |z|^2) / |z - b|^2).

    ``b`` is a boundary angle (radians) or a :class:`BoundaryPoint`.
    """
    z = _coord(p)
    theta = b.theta if isinstance(b, BoundaryPoint) else np.asarray(b, dtype=float)
    bb = np.exp(1j * theta)
    return np.log((1.0 - np.abs(z) ** 2) / np.abs(z - bb) ** 2)


def mobius_translate(a, p):
    """Disk isometry z -> (z + a) / (1 + conj(a) z), mapping 0 to a."""
    a, p = _coord(a), _coord(p)
    return (p + a) / (1.0 + np.conj(a) * p)


def polar_to_point(r, theta):
    """Point at geodesic distance ``r`` from the origin in direction ``theta``."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("geodesic radius must be nonnegative")
    return np.tanh(r / 2.0) * np.exp(1j * np.asarray(theta, dtype=float))


def point_to_polar(p):
    """Inverse of :func:`polar_to_point`; theta is 0 at the origin."""
    z = _coord(p)
    rad = np.abs(z)
    r = 2.0 * np.arctanh(rad)
    theta = np.where(rad > 0, np.angle(z) % (2 * np.pi), 0.0)
    return r, theta


def ball_area(R):
    """Area of a geodesic ball of radius R."""
    return 2.0 * np.pi * (np.cosh(R) - 1.0)
