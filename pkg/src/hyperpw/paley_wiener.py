"""Band-limited calculus: projection, Bernstein and moment inequalities,
bandwidth estimation, the Riesz interpolation operator, and the complex-time
Schroedinger group.

Everything here is multiplier algebra in mu(lambda) = lambda^2 + 1/4, the
eigenvalue of -Laplacian on the horocycle wave of frequency lambda.  Norms of
powers of the Laplacian are accumulated from log-weights so that powers up
to 40 of mu stay finite for every represented lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, polygamma

from .geometry import RHO
from .transform import SpectralFunction, SpectralGrid, apply_multiplier, plancherel_norm

BAND_TOL = 1e-14
DEFAULT_RIESZ_TERMS = 100_000


class BandLimitError(ValueError):
    """Spectrum carries energy at or above the band limit."""


def mu(lam):
    """Eigenvalue of minus the Laplacian at frequency lambda."""
    lam = np.asarray(lam, dtype=float)
    return lam * lam + RHO * RHO


@dataclass(frozen=True)
class BandRegion:
    """The band {lambda < omega}; chi is its indicator on a grid's lambda nodes."""

    omega: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")

    def chi(self, grid: SpectralGrid) -> np.ndarray:
        return (grid.lam < self.omega).astype(float)


def pw_project(F: SpectralFunction, omega: float) -> SpectralFunction:
    """Orthogonal projection onto spectra supported in lambda < omega."""
    if omega > F.grid.Lambda_max:
        raise ValueError(f"omega = {omega} exceeds the represented band {F.grid.Lambda_max}")
    return apply_multiplier(F, BandRegion(omega).chi(F.grid))


def _energy(F: SpectralFunction) -> np.ndarray:
    """Plancherel energy per lambda node."""
    return np.sum(np.abs(F.values) ** 2, axis=1) * F.grid.p * F.grid.q / F.grid.n_b


def band_excess(F: SpectralFunction, omega: float) -> float:
    """Fraction of the energy at lambda >= omega."""
    e = _energy(F)
    total = e.sum()
    return 0.0 if total == 0 else float(e[F.grid.lam >= omega].sum() / total)


def require_band_limited(F: SpectralFunction, omega: float, tol: float = BAND_TOL):
    frac = band_excess(F, omega)
    if frac > tol:
        raise BandLimitError(f"energy fraction {frac:.3e} at lambda >= {omega} exceeds {tol:.0e}")


def log_power_norm(F: SpectralFunction, s) -> np.ndarray:
    """log ||(-Laplacian)^s F|| for scalar or array s, without overflow."""
    e = _energy(F)
    keep = e > 0
    if not np.any(keep):
        return np.full(np.shape(s), -np.inf)
    le = np.log(e[keep])
    lm = np.log(mu(F.grid.lam[keep]))
    s = np.asarray(s, dtype=float)
    return 0.5 * logsumexp(le[None, :] + 2.0 * s.reshape(-1, 1) * lm[None, :], axis=1).reshape(s.shape)


def power_norm(F: SpectralFunction, s: float) -> float:
    """||(-Laplacian)^s F|| in the Plancherel norm."""
    return float(np.exp(log_power_norm(F, s)))


def bernstein_ratio(F: SpectralFunction, omega: float, s: float) -> float:
    """||Laplacian^s F|| / ((omega^2 + 1/4)^s ||F||) for F band-limited to omega."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    require_band_limited(F, omega)
    ln = log_power_norm(F, [s, 0.0])
    if not np.isfinite(ln[1]):
        raise ValueError("zero function")
    return float(np.exp(ln[0] - ln[1] - s * math.log(mu(omega))))


@dataclass(frozen=True)
class BandwidthEstimate:
    omega_hat: float
    ratios: tuple


def bandwidth_estimate(F: SpectralFunction, k_max: int = 40) -> BandwidthEstimate:
    """Moment ratios r_k = ||Delta^{k+1} F|| / ||Delta^k F||, k = 0..k_max.

    The ratios increase to the largest occupied eigenvalue mu, so
    omega_hat = sqrt(r_{k_max} - 1/4) estimates the band limit from above
    the occupied spectrum.
    """
    if k_max < 4:
        raise ValueError("k_max must be at least 4")
    ln = log_power_norm(F, np.arange(k_max + 2, dtype=float))
    if not np.isfinite(ln[0]):
        raise ValueError("zero function")
    ratios = np.exp(np.diff(ln))
    return BandwidthEstimate(float(math.sqrt(max(ratios[-1] - RHO * RHO, 0.0))),
                             tuple(float(r) for r in ratios))


# -- Riesz interpolation ----------------------------------------------------

def _half_integers(K: int) -> np.ndarray:
    """k - 1/2 for k = 1 - K .. K, symmetric about zero."""
    return np.arange(1 - K, K + 1) - 0.5


def riesz_scalar(mu_value, sigma: float, K_terms: int = DEFAULT_RIESZ_TERMS):
    """(sigma/pi^2) sum (-1)^(k-1) (k-1/2)^-2 exp(-i (pi/sigma) (k-1/2) mu).

    The sum runs over the 2 K_terms indices with |k - 1/2| < K_terms, so the
    terms for k and 1 - k pair up.  For |mu| <= sigma the full series equals
    -i mu; the truncation error is at most riesz_tail_bound(sigma, K_terms).
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if K_terms < 100:
        raise ValueError("K_terms must be at least 100")
    # pair k with 1 - k: the cosines cancel and the sines double
    h = np.arange(1, K_terms + 1) - 0.5
    sign = np.where(np.arange(K_terms) % 2 == 0, 1.0, -1.0)
    coef = sign / (h * h)
    m = np.atleast_1d(np.asarray(mu_value, dtype=float))
    out = np.empty(m.shape, dtype=complex)
    for idx, val in enumerate(m):
        out[idx] = -2j * (sigma / math.pi ** 2) * np.dot(coef, np.sin((math.pi / sigma) * h * val))
    return out[0] if np.ndim(mu_value) == 0 else out.reshape(np.shape(mu_value))


def riesz_scalar_direct(mu_value: float, sigma: float, K_terms: int) -> complex:
    """Unpaired evaluation of the same truncated sum (reference implementation)."""
    h = _half_integers(K_terms)
    k = h + 0.5
    sign = np.where(k % 2 == 1, 1.0, -1.0)       # (-1)^(k-1)
    terms = sign / (h * h) * np.exp(-1j * (math.pi / sigma) * h * mu_value)
    return complex((sigma / math.pi ** 2) * terms.sum())


def riesz_tail_bound(sigma: float, K_terms: int) -> float:
    """Bound on the omitted terms: (sigma/pi^2) sum_{|k-1/2| > K} (k-1/2)^-2 <= 2 sigma / (pi^2 (K-1))."""
    return 2.0 * sigma / (math.pi ** 2 * (K_terms - 1))


def riesz_weight_total(sigma: float, K_terms: int = DEFAULT_RIESZ_TERMS) -> float:
    """(sigma/pi^2) sum over all k of (k - 1/2)^-2, with the tail in closed form.

    The identity says this equals sigma, the operator-norm bound.
    """
    h = np.arange(1, K_terms + 1) - 0.5
    partial = 2.0 * np.sum(1.0 / (h * h)[::-1])
    tail = 2.0 * float(polygamma(1, K_terms + 0.5))
    return (sigma / math.pi ** 2) * (partial + tail)


def riesz_apply(F: SpectralFunction, sigma: float, K_terms: int = DEFAULT_RIESZ_TERMS) -> SpectralFunction:
    """Riesz interpolation operator applied as a multiplier in mu(lambda)."""
    return apply_multiplier(F, riesz_scalar(mu(F.grid.lam), sigma, K_terms))


def laplacian_power(F: SpectralFunction, n: int) -> SpectralFunction:
    return apply_multiplier(F, (-mu(F.grid.lam)) ** n)


def riesz_power_identity(F: SpectralFunction, sigma: float, n: int = 1,
                         K_terms: int = DEFAULT_RIESZ_TERMS) -> dict:
    """Relative distances of R^n F from Delta^n F and from (i Delta)^n F.

    On spectra with mu <= sigma the second vanishes up to truncation while
    the first does not (except where i^n = 1).
    """
    RF = F
    for _ in range(n):
        RF = riesz_apply(RF, sigma, K_terms)
    D = laplacian_power(F, n)
    scale = plancherel_norm(D)
    return {"vs_laplacian": plancherel_norm(RF - D) / scale,
            "vs_i_laplacian": plancherel_norm(RF - (1j ** n) * D) / scale}


# -- evolution groups -------------------------------------------------------

def schrodinger_multiplier(z: complex):
    """exp(i z Laplacian) = exp(-i z mu(lambda)) for complex time z."""
    return lambda lam: np.exp(-1j * z * mu(lam))


def wave_multiplier(s: float):
    """exp(i s sqrt(-Laplacian))."""
    return lambda lam: np.exp(1j * s * np.sqrt(mu(lam)))


def _log_norm(F: SpectralFunction) -> float:
    """log of the Plancherel norm, summed entrywise in logs."""
    a = np.abs(F.values)
    keep = a > 0
    if not np.any(keep):
        return -math.inf
    return 0.5 * float(logsumexp(2.0 * np.log(a[keep]) + np.log(F.grid.measure[keep])))


def schrodinger_extend(F: SpectralFunction, z: complex, omega: float):
    """u(z) = exp(i z Laplacian) F for F band-limited to omega.

    The multiplier acts on the band lambda < omega; the residual energy
    above omega allowed by BAND_TOL is dropped.

    Returns (u, ratio) where ratio = ||u|| / (exp((omega^2 + 1/4)|Im z|) ||F||)
    and asserts ratio <= 1 (up to rounding).
    """
    require_band_limited(F, omega)
    z = complex(z)
    # evaluate only inside the band: exp(mu |Im z|) overflows far above it
    inside = F.grid.lam < omega
    m = np.zeros(F.grid.lam.shape, dtype=complex)
    m[inside] = schrodinger_multiplier(z)(F.grid.lam[inside])
    u = apply_multiplier(F, m)
    # compare in logs: exp(mu |Im z|) overflows for large times
    lu = _log_norm(u)
    lf = _log_norm(F)
    ratio = float(np.exp(lu - lf - mu(omega) * abs(z.imag))) if np.isfinite(lf) else 0.0
    if ratio > 1.0 + 1e-12:
        raise AssertionError(f"growth bound violated: ratio {ratio}")
    return u, ratio


def moment_logconvexity_check(F: SpectralFunction, m: float, k: float, tol: float = 1e-12):
    """Check ||Delta^m F|| <= ||Delta^k F||^(m/k) ||F||^(1 - m/k) (constant 1).

    Returns (holds, slack) with slack = lhs / rhs.
    """
    if not 0 <= m <= k:
        raise ValueError("need 0 <= m <= k")
    ln = log_power_norm(F, [m, k, 0.0])
    if not np.isfinite(ln[2]):
        raise ValueError("zero function")
    theta = m / k if k > 0 else 0.0
    slack = float(np.exp(ln[0] - theta * ln[1] - (1 - theta) * ln[2]))
    return slack <= 1.0 + tol, slack
