"""Approximation by band-limited functions.

Best approximation E(f, t), the modulus of continuity, Besov norms, a
certified K-functional interval, the sampling-reconstruction error
Phi(f; Z_omega), rate fits, and the dyadic functional comparing
omega^alpha Phi with the Besov norm.  Smoothness norms are spectral:
||f||_{H^r} = ||(-Laplacian)^{r/2} f||.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frames import (DEFAULT_C, FrameSystem, band_grid, build_frame, domain_radius,
                     dual_apply)
from .paley_wiener import log_power_norm, mu, pw_project
from .transform import (SpatialFunction, SpectralFunction, SpectralGrid, forward,
                        plancherel_norm)

N_TAU = 32
TAU_SPAN = 2.0 ** -8        # smallest tau relative to s
N_S = 64
S_RANGE = (1e-3, 10.0)


@dataclass(frozen=True)
class BesovParams:
    alpha: float
    q: float
    r: int

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not (self.q >= 1):
            raise ValueError("q must lie in [1, inf]")
        if int(self.r) != self.r or self.r < 1:
            raise ValueError("r must be a positive integer")
        if math.isinf(self.q):
            if self.alpha > self.r:
                raise ValueError("need alpha <= r when q = inf")
        elif self.alpha >= self.r:
            raise ValueError("need alpha < r when q < inf")


def _energy(F: SpectralFunction) -> np.ndarray:
    return np.sum(np.abs(F.values) ** 2, axis=1) * F.grid.p * F.grid.q / F.grid.n_b


def best_approx(F: SpectralFunction, t: float) -> float:
    """E(f, t): Plancherel norm of the spectrum at lambda >= t."""
    if not t > 0:
        raise ValueError("t must be positive")
    e = _energy(F)
    return float(math.sqrt(e[F.grid.lam >= t].sum()))


def sobolev_seminorm(F: SpectralFunction, r: float) -> float:
    """||(-Laplacian)^{r/2} f||."""
    return float(np.exp(log_power_norm(F, r / 2)))


def jackson_check(F: SpectralFunction, t: float, r: float) -> float:
    """E(f, t) (t^2 + 1/4)^{r/2} / ||f||_{H^r}; the Jackson bound says this is <= 1."""
    h = sobolev_seminorm(F, r)
    if h == 0:
        raise ValueError("zero Sobolev norm")
    return best_approx(F, t) * float(mu(t)) ** (r / 2) / h


def tau_grid(s: float, n_tau: int = N_TAU) -> np.ndarray:
    """n_tau geometric points in [s * 2^-8, s) plus the endpoint s."""
    return np.append(s * TAU_SPAN ** (np.arange(n_tau, 0, -1) / n_tau), s)


def modulus(F: SpectralFunction, r: int, s: float, n_tau: int = N_TAU) -> float:
    """Omega_r(f, s) = sup over tau <= s of ||(I - exp(i tau sqrt(-Laplacian)))^r f||.

    The multiplier has modulus (2 |sin(tau sqrt(mu) / 2)|)^r; the sup is
    taken over :func:`tau_grid`.
    """
    if r < 1 or not s > 0:
        raise ValueError("need r >= 1 and s > 0")
    e = _energy(F)
    root = np.sqrt(mu(F.grid.lam))
    tau = tau_grid(s, n_tau)
    m = (2.0 * np.abs(np.sin(0.5 * tau[:, None] * root[None, :]))) ** (2 * r)
    return float(np.sqrt((m @ e).max()))


def s_grid(n_s: int = N_S, s_range=S_RANGE) -> np.ndarray:
    return np.geomspace(s_range[0], s_range[1], n_s)


def besov_seminorm(F: SpectralFunction, params: BesovParams, n_s: int = N_S,
                   s_range=S_RANGE, n_tau: int = N_TAU) -> float:
    """(int (s^-alpha Omega_r(f, s))^q ds/s)^{1/q}, trapezoid in log s; sup for q = inf."""
    s = s_grid(n_s, s_range)
    g = np.array([si ** -params.alpha * modulus(F, params.r, si, n_tau) for si in s])
    if math.isinf(params.q):
        return float(g.max())
    return float(np.trapezoid(g ** params.q, np.log(s)) ** (1.0 / params.q))


def besov_norm(F: SpectralFunction, params: BesovParams, n_s: int = N_S,
               s_range=S_RANGE, n_tau: int = N_TAU) -> float:
    return plancherel_norm(F) + besov_seminorm(F, params, n_s, s_range, n_tau)


def k2_functional(F: SpectralFunction, t: float, r: float):
    """Certified interval for the K-functional of the couple (L2, H^r).

    k2 is the quadratic functional inf (||f0||^2 + t^2 ||f1||_{H^r}^2)^{1/2},
    attained by the per-coefficient split f1 = f / (1 + t^2 mu^r); k_upper is
    ||f0|| + t ||f1||_{H^r} at that split.  k2 <= K(f, t) <= k_upper <= sqrt(2) k2.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    e = _energy(F)
    m = mu(F.grid.lam) ** r
    d = 1.0 + t * t * m
    k2 = math.sqrt(float(np.sum(e * t * t * m / d)))
    f0 = math.sqrt(float(np.sum(e * (t * t * m / d) ** 2)))
    f1 = math.sqrt(float(np.sum(e * m / d ** 2)))
    return k2, f0 + t * f1


def phi_error(f, omega: float, frame: FrameSystem) -> float:
    """Phi(f; Z_omega) = ||f^ - sum_j f_omega(x_j) Theta_j|| in the Plancherel norm.

    ``f`` is a spectrum on the frame's grid or a spatial function (which is
    transformed to that grid first).
    """
    F = forward(f, frame.grid) if isinstance(f, SpatialFunction) else f
    f_om = pw_project(F, omega)
    samples = frame.analysis.apply(f_om)
    rec = dual_apply(samples, frame)
    return plancherel_norm(F - rec)


@dataclass(frozen=True)
class RateReport:
    omegas: tuple
    values: tuple
    alpha_hat: float
    residual: float


def rate_fit(omegas, values) -> RateReport:
    """Least-squares slope of log(value) against log(omega); alpha_hat = -slope."""
    w = np.asarray(omegas, dtype=float)
    v = np.asarray(values, dtype=float)
    if w.size < 4 or w.size != v.size:
        raise ValueError("need at least 4 (omega, value) pairs")
    if np.any(v <= 0) or np.any(w <= 0):
        raise ValueError("omegas and values must be positive")
    x, y = np.log(w), np.log(v)
    slope, icpt = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + icpt)) ** 2)))
    return RateReport(tuple(w), tuple(v), float(-slope), resid)


# -- dyadic sweeps ----------------------------------------------------------

def sweep_grid(omega: float, tail_max: float, n_tail: int, c_P=None) -> SpectralGrid:
    kw = {} if c_P is None else {"c_P": c_P}
    return band_grid(omega, domain_radius(omega), tail_max=tail_max, n_tail=n_tail, **kw)


def sweep_frame(omega: float, c: float = DEFAULT_C, tail_max: float = None, n_tail: int = 0,
                solver_tol: float = None) -> FrameSystem:
    """Certified frame at band omega on the ball of radius domain_radius(omega)."""
    kw = {} if solver_tol is None else {"solver_tol": solver_tol}
    base = build_frame(omega, c, domain_radius(omega), **kw)
    return base if not n_tail else base.regrid(sweep_grid(omega, tail_max, n_tail, base.grid.c_P))


def phi_sweep(spectrum, omegas, c: float = DEFAULT_C, tail_max=None, n_tail: int = 64):
    """(E, Phi, frame) per omega for a spectrum given as ``spectrum(grid) -> SpectralFunction``.

    ``tail_max(omega)`` sets how far beyond omega the tail quadrature extends.
    """
    out = []
    for om in omegas:
        tm = tail_max(om) if callable(tail_max) else tail_max
        frame = sweep_frame(om, c, tm, n_tail)
        F = spectrum(frame.grid)
        out.append((best_approx(F, om), phi_error(F, om, frame), frame))
    return out


def theorem52_functional(spectrum, params: BesovParams, omegas, besov_grid: SpectralGrid,
                         c: float = DEFAULT_C, tail_max=None, n_tail: int = 64,
                         n_s: int = N_S, sweep=None) -> dict:
    """lhs = (sum_m (omega_m^alpha Phi_m)^q ln 2)^{1/q}, rhs = Besov norm, C_hat = lhs / rhs.

    ``omegas`` is a dyadic grid; the Besov norm is evaluated on ``besov_grid``.
    A precomputed ``sweep`` (output of :func:`phi_sweep`) may be passed in.
    """
    if sweep is None:
        sweep = phi_sweep(spectrum, omegas, c, tail_max, n_tail)
    om = np.asarray(omegas, dtype=float)
    phi = np.array([p for _, p, _ in sweep])
    terms = om ** params.alpha * phi
    if math.isinf(params.q):
        lhs = float(terms.max())
    else:
        lhs = float((np.sum(terms ** params.q) * math.log(2.0)) ** (1.0 / params.q))
    rhs = besov_norm(spectrum(besov_grid), params, n_s)
    return {"alpha": params.alpha, "q": params.q, "r": params.r, "lhs": lhs, "rhs": rhs,
            "C_hat": lhs / rhs if rhs > 0 else float("nan")}


# -- test spectra -----------------------------------------------------------

def heat_spectrum(grid: SpectralGrid, time: float = 1.0) -> SpectralFunction:
    """Transform of the heat kernel at the origin: exp(-time (lambda^2 + 1/4)), radial."""
    vals = np.exp(-time * mu(grid.lam))[:, None] * np.ones(grid.n_b)
    return SpectralFunction(vals, grid)


def power_profile_spectrum(grid: SpectralGrid, alpha: float) -> SpectralFunction:
    """Radial spectrum with energy density (1 + lambda)^(-2 alpha - 1) in lambda.

    Its best approximation is E(f, t)^2 = (1 + t)^(-2 alpha) / (2 alpha).
    """
    h = np.sqrt((1.0 + grid.lam) ** (-2 * alpha - 1) / grid.p)
    return SpectralFunction(h[:, None] * np.ones(grid.n_b), grid)
