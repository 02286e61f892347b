"""Band-limited analysis on the hyperbolic plane (Poincare disk model).

Modules: geometry, transform, paley_wiener, lattice, frames, quadrature,
approx, io, suite, cli.
"""

from .geometry import RHO, dist, busemann, mobius_translate
from .transform import (SpatialFunction, SpatialGrid, SpectralFunction, SpectralGrid,
                        build_spatial_grid, build_spectral_grid, forward, inverse,
                        inverse_to_grid, plancherel_norm, reference_grids)
from .paley_wiener import bandwidth_estimate, bernstein_ratio, pw_project
from .lattice import build_lattice, nyquist_radius, verify_lattice
from .frames import FrameSystem, RankDeficient, build_frame, dual_apply
from .quadrature import Ball, Band, spatial_weights, spectral_weights
from .approx import best_approx, phi_error, rate_fit, theorem52_functional

__version__ = "0.1.0"

__all__ = [
    "RHO", "dist", "busemann", "mobius_translate",
    "SpatialFunction", "SpatialGrid", "SpectralFunction", "SpectralGrid",
    "build_spatial_grid", "build_spectral_grid", "forward", "inverse", "inverse_to_grid",
    "plancherel_norm", "reference_grids",
    "bandwidth_estimate", "bernstein_ratio", "pw_project",
    "build_lattice", "nyquist_radius", "verify_lattice",
    "FrameSystem", "RankDeficient", "build_frame", "dual_apply",
    "Ball", "Band", "spatial_weights", "spectral_weights",
    "best_approx", "phi_error", "rate_fit", "theorem52_functional",
]
