"""Discretized Helgason-Fourier transform on the Poincare disk.

The spatial side is a geodesic polar product grid (composite Gauss-Legendre
in r against sinh(r) dr, trapezoid in theta).  The spectral side is a
composite Gauss-Legendre rule in lambda on [0, Lambda_max] times ``n_b``
equispaced boundary angles, carrying the Plancherel density
p(lambda) = c_P * lambda * tanh(pi * lambda).

Forward and inverse transforms are the plain discrete sums.  When the
angular grids coincide (n_theta == n_b) the angular sum is a circular
correlation and is evaluated with FFTs; otherwise a chunked dense kernel is
used.  Both paths evaluate the same sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from .geometry import RHO, ball_area, busemann, check_in_disk

PANEL = 16
# Plancherel normalization returned by calibrate_plancherel at the reference
# grid sizes (0.15915494309244); equal to 1/(2 pi) within 4e-12.
DEFAULT_C_P = 1.0 / (2.0 * np.pi)
# Geodesic width of the shell used by the boundary-mass check.
BOUNDARY_SHELL = 1.0
BOUNDARY_MASS_TOL = 1e-6
ANGULAR_TAIL_TOL = 1e-8

REFERENCE = dict(Lambda_max=16.0, n_lambda=128, n_b=256, R=4.0, n_r=160, n_theta=256)


class BoundaryMassError(ValueError):
    """Raised when a spatial function has too much mass near the truncation radius."""


class CalibrationError(RuntimeError):
    """Raised when Plancherel calibration is inconsistent across the test family."""


class AngularResolutionError(ValueError):
    """Raised when the top represented angular mode carries non-negligible energy."""


def composite_gauss_legendre(a: float, b: float, n: int, panel: int = PANEL):
    """Nodes and weights of a composite Gauss-Legendre rule on [a, b].

    Uses ``n // panel`` panels of ``panel`` points when ``panel`` divides
    ``n``; otherwise a single ``n``-point rule.
    """
    if n % panel != 0:
        panel = n
    npan = n // panel
    x, w = np.polynomial.legendre.leggauss(panel)
    edges = np.linspace(a, b, npan + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True, eq=False)
class SpatialGrid:
    R: float
    n_r: int
    n_theta: int
    r: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    radial_weights: np.ndarray = field(repr=False)

    @property
    def shape(self):
        return (self.n_r, self.n_theta)

    @property
    def points(self) -> np.ndarray:
        """Complex node coordinates, shape (n_r, n_theta)."""
        return np.tanh(self.r / 2)[:, None] * np.exp(1j * self.theta)[None, :]

    @property
    def weights(self) -> np.ndarray:
        return np.repeat(self.radial_weights[:, None] * (2 * np.pi / self.n_theta),
                         self.n_theta, axis=1)

    @property
    def key(self):
        return ("spatial", self.R, self.n_r, self.n_theta)

    def refined(self, factor: int = 2) -> "SpatialGrid":
        return build_spatial_grid(self.R, factor * self.n_r, factor * self.n_theta)


def build_spatial_grid(R: float, n_r: int, n_theta: int) -> SpatialGrid:
    if not R > 0:
        raise ValueError("R must be positive")
    if n_r < 8 or n_theta < 8:
        raise ValueError("n_r and n_theta must be at least 8")
    r, q = composite_gauss_legendre(0.0, R, n_r)
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    return SpatialGrid(float(R), int(n_r), int(n_theta), r, theta, q * np.sinh(r))


def plancherel_density(lam, c_P: float = DEFAULT_C_P):
    lam = np.asarray(lam, dtype=float)
    return c_P * lam * np.tanh(np.pi * lam)


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    lam: np.ndarray = field(repr=False)
    q: np.ndarray = field(repr=False)
    n_b: int
    c_P: float = DEFAULT_C_P
    Lambda_max: float = float("nan")

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        if lam.ndim != 1 or lam.size == 0:
            raise ValueError("lambda nodes must be a nonempty 1-D array")
        if lam[0] <= 0 or np.any(np.diff(lam) <= 0):
            raise ValueError("lambda nodes must be positive and strictly increasing")
        if self.n_b < 2 or self.n_b % 2:
            raise ValueError("n_b must be even")
        if not self.c_P > 0:
            raise ValueError("c_P must be positive")

    @property
    def n_lambda(self) -> int:
        return self.lam.size

    @property
    def shape(self):
        return (self.n_lambda, self.n_b)

    @property
    def theta_b(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n_b) / self.n_b

    @property
    def p(self) -> np.ndarray:
        return plancherel_density(self.lam, self.c_P)

    @property
    def measure(self) -> np.ndarray:
        """Per-node weights p(lambda_i) q_i / n_b, shape (n_lambda, n_b)."""
        return np.repeat((self.p * self.q / self.n_b)[:, None], self.n_b, axis=1)

    @property
    def key(self):
        return ("spectral", self.lam.tobytes(), self.n_b)

    def with_c_P(self, c_P: float) -> "SpectralGrid":
        return SpectralGrid(self.lam, self.q, self.n_b, c_P, self.Lambda_max)

    def band_count(self, omega: float) -> int:
        """Number of lambda nodes strictly below ``omega``."""
        return int(np.searchsorted(self.lam, omega, side="left"))


def build_spectral_grid(Lambda_max: float, n_lambda: int, n_b: int,
                        c_P: float = DEFAULT_C_P) -> SpectralGrid:
    if not Lambda_max > 0:
        raise ValueError("Lambda_max must be positive")
    if n_lambda < 16:
        raise ValueError("n_lambda must be at least 16")
    if n_b < 8 or n_b % 2:
        raise ValueError("n_b must be even and at least 8")
    lam, q = composite_gauss_legendre(0.0, Lambda_max, n_lambda)
    return SpectralGrid(lam, q, int(n_b), float(c_P), float(Lambda_max))


@dataclass(frozen=True, eq=False)
class SpectralFunction:
    values: np.ndarray
    grid: SpectralGrid

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("spectral values must be finite")
        object.__setattr__(self, "values", v)

    def __add__(self, other):
        return SpectralFunction(self.values + other.values, self.grid)

    def __sub__(self, other):
        return SpectralFunction(self.values - other.values, self.grid)

    def __mul__(self, alpha):
        return SpectralFunction(alpha * self.values, self.grid)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class SpatialFunction:
    values: np.ndarray
    grid: SpatialGrid

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("spatial values must be finite")
        object.__setattr__(self, "values", v)

    def __add__(self, other):
        return SpatialFunction(self.values + other.values, self.grid)

    def __sub__(self, other):
        return SpatialFunction(self.values - other.values, self.grid)

    def __mul__(self, alpha):
        return SpatialFunction(alpha * self.values, self.grid)

    __rmul__ = __mul__


def spectral_from_callable(grid: SpectralGrid, fn) -> SpectralFunction:
    """Sample ``fn(lam, theta_b)`` on the spectral grid."""
    L, T = np.meshgrid(grid.lam, grid.theta_b, indexing="ij")
    return SpectralFunction(np.broadcast_to(fn(L, T), grid.shape), grid)


def spatial_from_callable(grid: SpatialGrid, fn) -> SpatialFunction:
    """Sample ``fn(z)`` at the complex node coordinates."""
    return SpatialFunction(np.broadcast_to(fn(grid.points), grid.shape), grid)


# -- kernels ---------------------------------------------------------------

# Angular-kernel tables larger than this many complex entries are built
# chunk by chunk instead of being cached.
_TABLE_LIMIT = 12_000_000
_LAMBDA_CHUNK = 16


def _kernel_block(r, n_theta, lam):
    """FFT over angle of exp((-i lam + 1/2) <z, 1>) on the polar nodes."""
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    z = np.tanh(r / 2)[:, None] * np.exp(1j * theta)[None, :]
    B = busemann(z, 0.0)
    half = np.exp(RHO * B)
    out = np.empty((lam.size, r.size, n_theta), dtype=complex)
    for i, li in enumerate(lam):
        out[i] = np.fft.fft(half * np.exp(-1j * li * B), axis=1)
    return out


@lru_cache(maxsize=2)
def _cached_table(R, n_r, n_theta, lam_bytes):
    lam = np.frombuffer(lam_bytes, dtype=float)
    r, _ = composite_gauss_legendre(0.0, R, n_r)
    return _kernel_block(r, n_theta, lam)


def _kernel_tables(sgrid: SpatialGrid, fgrid: SpectralGrid):
    """Yield (lambda slice, table) pairs covering all lambda nodes."""
    if fgrid.n_lambda * sgrid.n_r * sgrid.n_theta <= _TABLE_LIMIT:
        yield slice(None), _cached_table(sgrid.R, sgrid.n_r, sgrid.n_theta,
                                         fgrid.lam.tobytes())
        return
    for s in range(0, fgrid.n_lambda, _LAMBDA_CHUNK):
        sl = slice(s, s + _LAMBDA_CHUNK)
        yield sl, _kernel_block(sgrid.r, sgrid.n_theta, fgrid.lam[sl])


def _aligned(sgrid: SpatialGrid, fgrid: SpectralGrid) -> bool:
    return sgrid.n_theta == fgrid.n_b


def forward_dense(f: SpatialFunction, fgrid: SpectralGrid, chunk: int = 2048) -> np.ndarray:
    """Direct evaluation of the forward sum, chunked over spatial nodes."""
    g = (f.values * f.grid.weights).ravel()
    z = f.grid.points.ravel()
    out = np.zeros(fgrid.shape, dtype=complex)
    tb = fgrid.theta_b
    for s in range(0, z.size, chunk):
        B = busemann(z[s:s + chunk, None], tb[None, :])
        gh = g[s:s + chunk, None] * np.exp(RHO * B)
        for i, li in enumerate(fgrid.lam):
            out[i] += np.sum(gh * np.exp(-1j * li * B), axis=0)
    return out


def forward(f: SpatialFunction, fgrid: SpectralGrid, check: bool = True) -> SpectralFunction:
    """Helgason-Fourier transform of a gridded spatial function.

    Raises :class:`BoundaryMassError` when more than 1e-6 of the energy sits
    in the outer shell r > R - 1 (truncation would be silent otherwise).
    """
    if check:
        frac = boundary_mass_fraction(f)
        if frac > BOUNDARY_MASS_TOL:
            raise BoundaryMassError(
                f"boundary-shell energy fraction {frac:.3e} exceeds {BOUNDARY_MASS_TOL:.0e}")
    if not _aligned(f.grid, fgrid):
        return SpectralFunction(forward_dense(f, fgrid), fgrid)
    G = np.fft.fft(f.values * f.grid.weights, axis=1)      # (n_r, n)
    acc = np.empty(fgrid.shape, dtype=complex)
    for sl, T in _kernel_tables(f.grid, fgrid):
        acc[sl] = np.einsum("jm,ijm->im", G, T)
    return SpectralFunction(np.fft.ifft(acc, axis=1), fgrid)


def inverse(F: SpectralFunction, points, chunk: int = 1024) -> np.ndarray:
    """Evaluate the inverse transform at arbitrary disk points."""
    pts = check_in_disk(points)
    shape = pts.shape
    z = pts.ravel()
    grid = F.grid
    H = F.values * grid.measure
    tb = grid.theta_b
    out = np.zeros(z.size, dtype=complex)
    for s in range(0, z.size, chunk):
        B = busemann(z[s:s + chunk, None], tb[None, :])
        half = np.exp(RHO * B)
        acc = np.zeros(B.shape[0], dtype=complex)
        for i, li in enumerate(grid.lam):
            acc += (half * np.exp(1j * li * B)) @ H[i]
        out[s:s + chunk] = acc
    return out.reshape(shape)


def inverse_to_grid(F: SpectralFunction, sgrid: SpatialGrid) -> SpatialFunction:
    """Inverse transform evaluated at every node of ``sgrid``."""
    if not _aligned(sgrid, F.grid):
        return SpatialFunction(inverse(F, sgrid.points), sgrid)
    Hh = np.fft.fft(F.values * F.grid.measure, axis=1)    # (n_lambda, n)
    acc = np.zeros(sgrid.shape, dtype=complex)
    for sl, T in _kernel_tables(sgrid, F.grid):
        acc += np.einsum("im,ijm->jm", Hh[sl], T.conj())
    return SpatialFunction(np.fft.ifft(acc, axis=1), sgrid)


# -- norms and multipliers --------------------------------------------------

def plancherel_norm(F: SpectralFunction) -> float:
    return float(np.sqrt(np.sum(np.abs(F.values) ** 2 * F.grid.measure)))


def plancherel_inner(F: SpectralFunction, G: SpectralFunction) -> complex:
    """<F, G> = sum F conj(G) p q / n_b."""
    return complex(np.sum(F.values * np.conj(G.values) * F.grid.measure))


def l2_norm(f: SpatialFunction) -> float:
    return float(np.sqrt(np.sum(np.abs(f.values) ** 2 * f.grid.weights)))


def integrate(f: SpatialFunction, mask=None) -> complex:
    w = f.grid.weights if mask is None else f.grid.weights * mask
    return complex(np.sum(f.values * w))


Multiplier = Union[Callable[[np.ndarray], np.ndarray], np.ndarray]


def multiplier_values(grid: SpectralGrid, m: Multiplier) -> np.ndarray:
    vals = m(grid.lam) if callable(m) else m
    vals = np.broadcast_to(np.asarray(vals, dtype=complex), grid.lam.shape)
    if not np.all(np.isfinite(vals)):
        raise ValueError("multiplier is not finite on the lambda nodes")
    return vals


def apply_multiplier(F: SpectralFunction, m: Multiplier) -> SpectralFunction:
    """Pointwise multiplication by m(lambda) (a function of the Laplacian)."""
    return SpectralFunction(F.values * multiplier_values(F.grid, m)[:, None], F.grid)


def laplacian_symbol(lam):
    """Multiplier of the Laplace-Beltrami operator: -(lambda^2 + 1/4)."""
    lam = np.asarray(lam, dtype=float)
    return -(lam ** 2 + RHO ** 2)


def fd_laplacian(func, points, h: float = 1e-2) -> np.ndarray:
    """Fourth-order finite-difference Laplace-Beltrami operator.

    ``func`` maps an array of disk points to values.  Each point x is moved
    to the origin by the isometry w -> T_x(w); there the metric is
    4|dw|^2, so the Laplacian is one quarter of the Euclidean one.
    """
    x = check_in_disk(points)
    offsets = np.array([2 * h, h, -h, -2 * h])
    coef = np.array([-1.0, 16.0, 16.0, -1.0])
    stencil = np.concatenate([offsets, 1j * offsets, [0.0]])
    pts = (stencil[None, :] + x[..., None]) / (1.0 + np.conj(x)[..., None] * stencil[None, :])
    vals = func(pts)
    centre = vals[..., -1]
    dxx = (vals[..., 0:4] @ coef - 30.0 * centre) / (12 * h * h)
    dyy = (vals[..., 4:8] @ coef - 30.0 * centre) / (12 * h * h)
    return 0.25 * (dxx + dyy)


# -- diagnostics ------------------------------------------------------------

def boundary_mass_fraction(f: SpatialFunction, shell: float = BOUNDARY_SHELL) -> float:
    e = np.abs(f.values) ** 2 * f.grid.weights
    total = e.sum()
    if total == 0:
        return 0.0
    outer = f.grid.r > f.grid.R - shell
    return float(e[outer].sum() / total)


def angular_tail_fraction(values: np.ndarray, weights=None) -> float:
    """Energy fraction in the top represented angular mode (|m| = n/2).

    ``values`` has the angle on its last axis; ``weights`` optionally
    weights the leading axis (radial or spectral measure).
    """
    v = np.asarray(values)
    c = np.fft.fft(v, axis=-1) / v.shape[-1]
    e = np.abs(c) ** 2
    if weights is not None:
        e = e * np.asarray(weights)[..., None]
    total = e.sum()
    if total == 0:
        return 0.0
    return float(e[..., v.shape[-1] // 2].sum() / total)


def check_angular_resolution(values, weights=None, tol: float = ANGULAR_TAIL_TOL):
    frac = angular_tail_fraction(values, weights)
    if frac > tol:
        raise AngularResolutionError(
            f"top angular mode carries {frac:.3e} of the energy (limit {tol:.0e})")
    return frac


# -- calibration ------------------------------------------------------------

def smooth_bump(lam, center: float, width: float = 2.0):
    """Gaussian spectral envelope, even in lambda, centred at +-center."""
    lam = np.asarray(lam, dtype=float)
    return (np.exp(-0.5 * ((lam - center) / width) ** 2)
            + np.exp(-0.5 * ((lam + center) / width) ** 2))


def translated_profile(grid: SpectralGrid, profile, a: complex = 0.0) -> SpectralFunction:
    """Transform of a radial function centred at the disk point ``a``.

    ``profile(lam)`` is the spherical transform of the radial function; the
    translate to ``a`` has transform profile(lam) * exp((-i lam + 1/2) <a, b>).
    Even profiles give spatially confined functions, unlike a radial profile
    multiplied by an arbitrary angular factor.
    """
    def fn(L, T):
        return profile(L) * np.exp((-1j * L + RHO) * busemann(a, T))
    return spectral_from_callable(grid, fn)


# (center, width, translation) of the calibration bumps; all centres in [1, 4]
CALIBRATION_BUMPS = (
    (1.0, 2.0, 0.0),
    (1.5, 2.0, 0.2),
    (2.5, 2.0, -0.25j),
    (3.0, 2.0, 0.15 + 0.15j),
    (4.0, 2.0, 0.1),
)


def calibration_family(grid: SpectralGrid) -> list:
    """Five fixed smooth spectral test functions used to calibrate c_P."""
    return [translated_profile(grid, lambda L, c=c, w=w: smooth_bump(L, c, w), a)
            for c, w, a in CALIBRATION_BUMPS]


def random_bandlimited(grid: SpectralGrid, rng, lam_lo: float = 0.5, lam_hi: float = 4.0,
                       n_terms: int = 3, max_shift: float = 0.3) -> SpectralFunction:
    """Random smooth spectrum: a few translated even bumps with centres in [lam_lo, lam_hi].

    Bump widths are 2 to 2.5, so the energy reaches to roughly lam_hi + 5.
    """
    vals = np.zeros(grid.shape, dtype=complex)
    for _ in range(n_terms):
        c = rng.uniform(lam_lo, lam_hi)
        w = rng.uniform(2.0, 2.5)
        a = max_shift * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        coef = rng.normal() + 1j * rng.normal()
        vals += coef * translated_profile(grid, lambda L, c=c, w=w: smooth_bump(L, c, w), a).values
    return SpectralFunction(vals, grid)


@dataclass(frozen=True)
class Calibration:
    c_P: float
    per_function: tuple
    spread: float
    max_mismatch: float


def calibrate_plancherel(sgrid: SpatialGrid, fgrid: SpectralGrid,
                         spread_tol: float = 1e-4) -> Calibration:
    """Fit c_P so that the discrete Plancherel identity holds on the family.

    Each family member G is taken to space with c_P = 1, transformed back,
    and the ratio ||f||^2 / sum |F|^2 lambda tanh(pi lambda) q / n_b gives a
    per-function estimate.  The returned c_P minimizes the maximum relative
    norm mismatch over the family.
    """
    unit = fgrid.with_c_P(1.0)
    ests = []
    for G in calibration_family(unit):
        f = inverse_to_grid(G, sgrid)
        F = forward(f, unit, check=True)
        ests.append(l2_norm(f) ** 2 / plancherel_norm(F) ** 2)
    ests = np.array(ests)
    s = np.sqrt(ests)
    # balance the extreme relative norm errors sqrt(c / c_i) - 1
    root = 2.0 / (1.0 / s.min() + 1.0 / s.max())
    c_P = root ** 2
    mism = np.abs(np.sqrt(c_P / ests) - 1.0)
    spread = float((ests.max() - ests.min()) / ests.mean())
    if spread > spread_tol:
        raise CalibrationError(f"calibration spread {spread:.3e} exceeds {spread_tol:.0e}")
    return Calibration(float(c_P), tuple(ests), spread, float(mism.max()))


def reference_grids(c_P: float = DEFAULT_C_P, scale: int = 1):
    ref = REFERENCE
    s = build_spatial_grid(ref["R"], scale * ref["n_r"], scale * ref["n_theta"])
    f = build_spectral_grid(ref["Lambda_max"], scale * ref["n_lambda"], scale * ref["n_b"], c_P)
    return s, f


def ball_area_check(sgrid: SpatialGrid) -> float:
    """Relative error of the grid's total weight against the ball area."""
    return abs(sgrid.weights.sum() - ball_area(sgrid.R)) / ball_area(sgrid.R)


__all__ = [name for name in dir() if not name.startswith("_") and name not in {"annotations", "math"}]
