"""Sampling frames for band-limited spectra and dual-frame reconstruction.

A spectrum F on the columns {(lambda_i, b_k) : lambda_i < omega} of a
spectral grid determines f(x) by the discrete inversion sum, so sampling f
on a lattice is a linear map E.  With w = p q / n_b the Plancherel weights,
E = K diag(w) where K[j, (i, k)] = exp((i lambda_i + 1/2) <x_j, b_k>), and
the adjoint in the weighted inner product is K^H.  All solves run in the
whitened coordinates u = sqrt(w) F, where the frame operator becomes the
ordinary Hermitian matrix S = Kw^H Kw with Kw = K diag(sqrt(w)).

The band space is discretized with few lambda nodes and boundary angles
(see band_layout): sampling on a ball of radius R only sees a limited part
of the band, and finer band grids make the sampling problem singular
regardless of sampling density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .geometry import RHO, busemann, check_in_disk
from .lattice import Lattice, build_lattice, nyquist_radius
from .transform import (DEFAULT_C_P, SpectralFunction, SpectralGrid,
                        composite_gauss_legendre)

DEFAULT_SOLVER_TOL = 1e-10
EIG_TOL = 1e-8
RANK_TOL = 1e-12
MAX_COND = 100.0
# Largest c with frame condition <= MAX_COND at omega in {2, 4, 8} on the
# radius-4 ball, from calibrate_sampling_constant(c_lo=4, c_hi=16).
DEFAULT_C = 10.796875
DEFAULT_DOMAIN_RADIUS = 4.0
# Beyond omega = 8 the sampled ball shrinks as 32 / omega.
DOMAIN_SCALE = 32.0
# Domains at least this large are treated as strongly hyperbolic by band_layout.
HYPERBOLIC_RADIUS = 3.0
MAX_POWER_ITER = 200_000


class FrameError(ValueError):
    """Raised for degenerate frame inputs (empty band or empty lattice)."""


class RankDeficient(RuntimeError):
    """The sampling set does not give a frame at this band limit."""

    def __init__(self, message, A=None, B=None):
        super().__init__(message)
        self.A, self.B = A, B


class SolverError(RuntimeError):
    """Conjugate gradients did not reach the requested residual."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual, self.iterations = residual, iterations


# -- band grids -------------------------------------------------------------

def band_layout(omega: float, R: float) -> tuple:
    """(n_lambda, n_b) of the band grid used for sampling at band omega on radius R.

    Empirical rule: on large balls the band space can grow with omega * R
    and stay well conditioned; on small, nearly Euclidean balls only the
    minimal 2 x 8 layout is visible to sampling.
    """
    if R >= HYPERBOLIC_RADIUS:
        return max(2, int(round(omega * R / 10))), 2 * math.ceil(0.75 * omega * R)
    return 2, 8


def analysis_grid(omega: float, n_lambda: int, n_b: int, tail_max: float = None,
                  n_tail: int = 0, c_P: float = DEFAULT_C_P) -> SpectralGrid:
    """Spectral grid whose nodes below omega are a Gauss-Legendre band rule.

    Optional tail nodes on [omega, tail_max] use Gauss-Legendre in
    log(1 + lambda), so slowly decaying spectra are integrated accurately far
    beyond omega.
    """
    if not omega > 0:
        raise FrameError("omega must be positive")
    lam, q = composite_gauss_legendre(0.0, omega, n_lambda)
    top = omega
    if n_tail:
        if tail_max is None or tail_max <= omega:
            raise FrameError("tail_max must exceed omega")
        u, qu = composite_gauss_legendre(math.log1p(omega), math.log1p(tail_max), n_tail)
        lt = np.expm1(u)
        lam = np.concatenate([lam, lt])
        q = np.concatenate([q, qu * (1.0 + lt)])
        top = tail_max
    return SpectralGrid(lam, q, int(n_b), float(c_P), float(top))


def domain_radius(omega: float) -> float:
    """Radius of the sampled ball used at band omega."""
    return min(DEFAULT_DOMAIN_RADIUS, DOMAIN_SCALE / omega)


def band_grid(omega: float, R: float = DEFAULT_DOMAIN_RADIUS, c_P: float = DEFAULT_C_P,
              tail_max: float = None, n_tail: int = 0) -> SpectralGrid:
    n_lam, n_b = band_layout(omega, R)
    return analysis_grid(omega, n_lam, n_b, tail_max, n_tail, c_P)


# -- analysis operator ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AnalysisOperator:
    """Sampling map from band-limited spectra to point values."""

    kernel: np.ndarray = field(repr=False)     # K, rows = points, cols = band (i, k)
    weights: np.ndarray = field(repr=False)    # w = p q / n_b per column
    points: np.ndarray = field(repr=False)
    grid: SpectralGrid
    omega: float
    n_band: int                                # lambda nodes below omega

    @property
    def shape(self):
        return self.kernel.shape

    @property
    def matrix(self) -> np.ndarray:
        """E = K diag(w), so that E @ F_band gives point values."""
        return self.kernel * self.weights[None, :]

    @property
    def whitened(self) -> np.ndarray:
        return self.kernel * np.sqrt(self.weights)[None, :]

    def band_values(self, F: SpectralFunction) -> np.ndarray:
        if F.grid is not self.grid and not _same_grid(F.grid, self.grid):
            raise FrameError("spectral function lives on a different grid")
        return F.values[: self.n_band].ravel()

    def embed(self, band: np.ndarray) -> SpectralFunction:
        """Spectral function on the full grid, zero outside the band."""
        vals = np.zeros(self.grid.shape, dtype=complex)
        vals[: self.n_band] = np.asarray(band).reshape(self.n_band, self.grid.n_b)
        return SpectralFunction(vals, self.grid)

    def apply(self, F: SpectralFunction) -> np.ndarray:
        return self.matrix @ self.band_values(F)


def _same_grid(a: SpectralGrid, b: SpectralGrid) -> bool:
    return (a.n_b == b.n_b and a.lam.shape == b.lam.shape and np.array_equal(a.lam, b.lam)
            and np.array_equal(a.q, b.q) and a.c_P == b.c_P)


def sampling_kernel(points, grid: SpectralGrid, n_band: int) -> np.ndarray:
    """K[j, (i, k)] = exp((i lambda_i + 1/2) <x_j, b_k>) for the first n_band lambdas."""
    z = check_in_disk(points).ravel()
    B = busemann(z[:, None], grid.theta_b[None, :])           # (n_points, n_b)
    lam = grid.lam[:n_band]
    K = np.exp(RHO * B)[:, None, :] * np.exp(1j * lam[None, :, None] * B[:, None, :])
    return K.reshape(z.size, n_band * grid.n_b)


def assemble_analysis(L, omega: float, grid: SpectralGrid) -> AnalysisOperator:
    """Analysis operator of the lattice ``L`` (a Lattice or point array) on band omega."""
    pts = np.asarray(L.points if isinstance(L, Lattice) else L, dtype=complex).ravel()
    if pts.size == 0:
        raise FrameError("empty sampling set")
    n_band = grid.band_count(omega)
    if n_band == 0:
        raise FrameError(f"no lambda nodes below omega = {omega}")
    w = np.repeat(grid.p[:n_band] * grid.q[:n_band] / grid.n_b, grid.n_b)
    return AnalysisOperator(sampling_kernel(pts, grid, n_band), w, pts, grid,
                            float(omega), n_band)


# -- frame bounds -----------------------------------------------------------

def _power(apply, n: int, tol: float, max_iter: int):
    """Dominant eigenpair of a Hermitian PSD map from the all-ones start."""
    v = np.ones(n, dtype=complex) / math.sqrt(n)
    theta = 0.0
    for it in range(1, max_iter + 1):
        Av = apply(v)
        theta = float(np.real(np.vdot(v, Av)))
        res = np.linalg.norm(Av - theta * v)
        nrm = np.linalg.norm(Av)
        if nrm == 0:
            return 0.0, v, it
        if res <= tol * abs(theta):
            return theta, v, it
        v = Av / nrm
    return theta, v, max_iter


def gram(E: AnalysisOperator) -> np.ndarray:
    """Frame operator in whitened coordinates."""
    W = E.whitened
    return W.conj().T @ W


def frame_bounds(E: AnalysisOperator, tol: float = EIG_TOL, max_iter: int = MAX_POWER_ITER):
    """Optimal frame bounds (A, B) by power iteration and shifted power iteration.

    Raises :class:`RankDeficient` when A < 1e-12 B (including the structural
    case of fewer samples than band dimensions).
    """
    S = gram(E)
    n = S.shape[0]
    B, _, _ = _power(lambda v: S @ v, n, tol, max_iter)
    if E.shape[0] < n:
        raise RankDeficient(f"{E.shape[0]} samples for {n} band dimensions", 0.0, B)
    # the top eigenvalue of B I - S is B - A; converge it to tol relative to B
    mu, _, _ = _power(lambda v: B * v - S @ v, n, tol * B / max(B, 1e-300), max_iter)
    A = B - mu
    if not A > RANK_TOL * B:
        raise RankDeficient(f"lower frame bound {A:.3e} is below {RANK_TOL:.0e} B", A, B)
    return A, B


# -- frame system -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FrameSystem:
    analysis: AnalysisOperator
    A: float
    B: float
    omega: float
    lattice: object = field(repr=False)
    solver_tol: float = DEFAULT_SOLVER_TOL
    c: float = float("nan")

    @property
    def bounds(self):
        return self.A, self.B

    @property
    def cond(self) -> float:
        return self.B / self.A

    @property
    def grid(self) -> SpectralGrid:
        return self.analysis.grid

    @property
    def dim(self) -> int:
        return self.analysis.shape[1]

    @cached_property
    def dual_matrix(self) -> np.ndarray:
        """Band values of all dual spectra, one column per sampling point."""
        E = self.analysis
        W = E.whitened
        U = _solve_whitened(self, W.conj().T)
        return U / np.sqrt(E.weights)[:, None]

    def regrid(self, grid: SpectralGrid) -> "FrameSystem":
        """Same frame on a grid with identical band nodes (e.g. extra tail nodes)."""
        old = self.grid
        n = self.analysis.n_band
        if (grid.band_count(self.omega) != n or grid.n_b != old.n_b or grid.c_P != old.c_P
                or not np.array_equal(grid.lam[:n], old.lam[:n])
                or not np.array_equal(grid.q[:n], old.q[:n])):
            raise FrameError("band nodes of the new grid differ from the frame's")
        E = self.analysis
        E2 = AnalysisOperator(E.kernel, E.weights, E.points, grid, E.omega, n)
        return FrameSystem(E2, self.A, self.B, self.omega, self.lattice, self.solver_tol, self.c)

    def report(self) -> dict:
        r = self.lattice.r if isinstance(self.lattice, Lattice) else float("nan")
        return {"omega": self.omega, "r": r, "c": self.c, "n_points": int(self.analysis.shape[0]),
                "A": self.A, "B": self.B, "cond": self.cond, "solver_tol": self.solver_tol}


def certify_frame(L, omega: float, grid: SpectralGrid, solver_tol: float = DEFAULT_SOLVER_TOL,
                  c: float = float("nan")) -> FrameSystem:
    E = assemble_analysis(L, omega, grid)
    A, B = frame_bounds(E)
    return FrameSystem(E, A, B, float(omega), L, solver_tol, c)


def build_frame(omega: float, c: float, R: float = DEFAULT_DOMAIN_RADIUS, grid: SpectralGrid = None,
                solver_tol: float = DEFAULT_SOLVER_TOL, seed: int = 0) -> FrameSystem:
    """Lattice at the radius r = c (omega^2 + 1/4)^(-1/2) on the ball of radius R, certified."""
    if grid is None:
        grid = band_grid(omega, R)
    L = cached_lattice(R, nyquist_radius(omega, c), seed)
    return certify_frame(L, omega, grid, solver_tol, c)


@lru_cache(maxsize=64)
def cached_lattice(R: float, r: float, seed: int = 0) -> Lattice:
    return build_lattice(R, r, seed)


# -- reconstruction ---------------------------------------------------------

def conjugate_gradient(apply, b: np.ndarray, tol: float, max_iter: int):
    """CG for a Hermitian positive definite map; columns of b are solved independently.

    Returns (x, relative residuals, iterations).  Raises SolverError when a
    column has not converged after ``max_iter`` iterations.
    """
    b = np.asarray(b, dtype=complex)
    single = b.ndim == 1
    if single:
        b = b[:, None]
    x = np.zeros_like(b)
    bnorm = np.linalg.norm(b, axis=0)
    scale = np.where(bnorm > 0, bnorm, 1.0)
    r = b.copy()
    p = r.copy()
    rr = np.real(np.sum(r.conj() * r, axis=0))
    done = np.sqrt(rr) / scale <= tol
    it = 0
    while not np.all(done):
        if it >= max_iter:
            res = np.sqrt(rr) / scale
            raise SolverError(f"CG stopped after {it} iterations with relative residual "
                              f"{res.max():.3e} > {tol:.0e}", float(res.max()), it)
        it += 1
        act = ~done
        Ap = apply(p[:, act])
        pAp = np.real(np.sum(p[:, act].conj() * Ap, axis=0))
        alpha = rr[act] / pAp
        x[:, act] += alpha * p[:, act]
        r[:, act] -= alpha * Ap
        rr_new = np.real(np.sum(r[:, act].conj() * r[:, act], axis=0))
        beta = rr_new / rr[act]
        p[:, act] = r[:, act] + beta * p[:, act]
        rr[act] = rr_new
        done = np.sqrt(rr) / scale <= tol
    res = np.sqrt(rr) / scale
    return (x[:, 0] if single else x), res, it


def _solve_whitened(frame: FrameSystem, rhs: np.ndarray):
    W = frame.analysis.whitened
    S = W.conj().T @ W
    x, res, it = conjugate_gradient(lambda v: S @ v, rhs, frame.solver_tol, 10 * frame.dim)
    return x


def dual_apply(samples, frame: FrameSystem) -> SpectralFunction:
    """Band-limited spectrum sum_j samples_j Theta_j, via one CG solve of S u = E^* samples."""
    y = np.asarray(samples, dtype=complex).ravel()
    E = frame.analysis
    if y.size != E.shape[0]:
        raise FrameError(f"expected {E.shape[0]} samples, got {y.size}")
    W = E.whitened
    u = _solve_whitened(frame, W.conj().T @ y)
    return E.embed(u / np.sqrt(E.weights))


def dual_frame_functions(frame: FrameSystem) -> list:
    """Dual frame spectra Theta_j = S^{-1} k_j, one CG solve per sampling point."""
    D = frame.dual_matrix
    return [frame.analysis.embed(D[:, j]) for j in range(D.shape[1])]


def random_band_spectrum(grid: SpectralGrid, omega: float, rng) -> SpectralFunction:
    """Random element of the discrete band space (i.i.d. complex normal whitened coefficients)."""
    n_band = grid.band_count(omega)
    w = grid.p[:n_band] * grid.q[:n_band] / grid.n_b
    vals = np.zeros(grid.shape, dtype=complex)
    g = rng.normal(size=(n_band, grid.n_b)) + 1j * rng.normal(size=(n_band, grid.n_b))
    vals[:n_band] = g / np.sqrt(w)[:, None]
    return SpectralFunction(vals, grid)


# -- calibration of the sampling constant -------------------------------------

@dataclass(frozen=True)
class SamplingCalibration:
    c: float
    conds: dict
    history: tuple


def sweep_condition(c: float, omegas, R: float = DEFAULT_DOMAIN_RADIUS) -> dict:
    """Frame condition number per omega at constant c (inf when not a frame)."""
    out = {}
    for om in omegas:
        try:
            out[om] = build_frame(om, c, R).cond
        except RankDeficient:
            out[om] = math.inf
    return out


def calibrate_sampling_constant(omegas=(2.0, 4.0, 8.0), c_lo: float = 4.0, c_hi: float = 16.0,
                                steps: int = 8, max_cond: float = MAX_COND,
                                R: float = DEFAULT_DOMAIN_RADIUS) -> SamplingCalibration:
    """Largest c (bisection) for which the frame condition stays below max_cond across omegas."""
    history = []
    lo = sweep_condition(c_lo, omegas, R)
    history.append((c_lo, lo))
    if max(lo.values()) > max_cond:
        raise RankDeficient(f"c = {c_lo} already violates cond <= {max_cond}")
    hi = sweep_condition(c_hi, omegas, R)
    history.append((c_hi, hi))
    if max(hi.values()) <= max_cond:
        return SamplingCalibration(c_hi, hi, tuple(history))
    best = lo
    for _ in range(steps):
        mid = 0.5 * (c_lo + c_hi)
        conds = sweep_condition(mid, omegas, R)
        history.append((mid, conds))
        if max(conds.values()) <= max_cond:
            c_lo, best = mid, conds
        else:
            c_hi = mid
    return SamplingCalibration(c_lo, best, tuple(history))
