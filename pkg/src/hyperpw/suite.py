"""Invariant suite: one check per acceptance property.

Each check returns a :class:`Result` with the measured quantity and the
threshold it is held to.  ``run_suite`` drives them for the CLI ``check``
command; the test-suite calls the same functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import approx, frames, lattice, paley_wiener as pw, transform as tr
from .geometry import polar_to_point
from .quadrature import Ball, Band, apply_rule, spatial_weights, spectral_weights

ACCEPTANCE_OMEGAS = (2.0, 4.0, 8.0)
RATE_OMEGAS = (4.0, 8.0, 16.0, 32.0)
RATE_ALPHAS = (0.75, 1.25, 2.0)
DYADIC = tuple(2.0 ** m for m in range(1, 7))
DYADIC_EXTENDED = tuple(2.0 ** m for m in range(1, 8))
BESOV_CASES = ((1.0, 2.0), (1.5, 2.0), (1.0, math.inf))


@dataclass
class Result:
    key: str
    title: str
    passed: bool
    value: float
    threshold: float
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.key} {self.title}: {self.value:.3e} (threshold {self.threshold:.3e})"


def _rel(a, b) -> float:
    return float(np.linalg.norm(np.ravel(a) - np.ravel(b)) / np.linalg.norm(np.ravel(b)))


def _random_band(grid: tr.SpectralGrid, omega: float, rng) -> tr.SpectralFunction:
    n = grid.band_count(omega)
    vals = np.zeros(grid.shape, dtype=complex)
    vals[:n] = rng.normal(size=(n, grid.n_b)) + 1j * rng.normal(size=(n, grid.n_b))
    return tr.SpectralFunction(vals, grid)


def _random_full(grid: tr.SpectralGrid, rng) -> tr.SpectralFunction:
    # decaying random spectrum so every Sobolev norm is finite and balanced
    scale = np.exp(-0.25 * grid.lam * rng.uniform(0.2, 2.0))
    g = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    return tr.SpectralFunction(g * scale[:, None], grid)


# 1 -------------------------------------------------------------------------

def check_plancherel(seed: int = 0, n_random: int = 20) -> Result:
    sgrid, fgrid = tr.reference_grids()
    fam_rt, fam_norm, rnd_rt, rnd_norm = [], [], [], []
    for G in tr.calibration_family(fgrid):
        f = tr.inverse_to_grid(G, sgrid)
        F = tr.forward(f, fgrid)
        fam_rt.append(tr.plancherel_norm(F - G) / tr.plancherel_norm(G))
        fam_norm.append(abs(tr.plancherel_norm(F) - tr.l2_norm(f)) / tr.l2_norm(f))
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        G = tr.random_bandlimited(fgrid, rng)
        f = tr.inverse_to_grid(G, sgrid)
        F = tr.forward(f, fgrid)
        rnd_rt.append(tr.plancherel_norm(F - G) / tr.plancherel_norm(G))
        rnd_norm.append(abs(tr.plancherel_norm(F) - tr.l2_norm(f)) / tr.l2_norm(f))
    fam = max(max(fam_rt), max(fam_norm))
    rnd = max(max(rnd_rt), max(rnd_norm))
    ok = fam <= 1e-6 and rnd <= 1e-5
    return Result("1", "Plancherel and inversion (error / tolerance)", ok,
                  max(fam / 1e-6, rnd / 1e-5), 1.0,
                  {"family_max": fam, "random_max": rnd, "family_tol": 1e-6, "random_tol": 1e-5})


# 2 -------------------------------------------------------------------------

def check_laplacian(seed: int = 0) -> Result:
    _, fgrid = tr.reference_grids()
    rng = np.random.default_rng(seed)
    pts = polar_to_point(rng.uniform(0, 2, 40), rng.uniform(0, 2 * np.pi, 40))
    worst = 0.0
    for G in tr.calibration_family(fgrid)[:3]:
        lap = tr.inverse(tr.apply_multiplier(G, tr.laplacian_symbol), pts)
        fd = tr.fd_laplacian(lambda z, G=G: tr.inverse(G, z), pts)
        worst = max(worst, _rel(lap, fd))
    # approximate eigenfunction: one lambda node, one angular mode
    i0 = fgrid.band_count(5.0)
    vals = np.zeros(fgrid.shape, dtype=complex)
    vals[i0] = np.exp(3j * fgrid.theta_b)
    S = tr.SpectralFunction(vals, fgrid)
    val = tr.inverse(S, pts)
    fd = tr.fd_laplacian(lambda z: tr.inverse(S, z), pts)
    eig = _rel(-(fgrid.lam[i0] ** 2 + 0.25) * val, fd)
    v = max(worst, eig)
    return Result("2", "Laplacian symbol vs finite differences", v <= 1e-3, v, 1e-3,
                  {"multiplier": worst, "eigen_relation": eig})


# 3 -------------------------------------------------------------------------

def check_bernstein(seed: int = 0, n: int = 100) -> Result:
    _, fgrid = tr.reference_grids()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for om in ACCEPTANCE_OMEGAS:
        for _ in range(n):
            F = _random_band(fgrid, om, rng)
            for s in (0.5, 1.0, 2.0, 5.0):
                worst = max(worst, pw.bernstein_ratio(F, om, s))
    return Result("3", "Bernstein ratio", worst <= 1 + 1e-12, worst, 1 + 1e-12)


# 4 -------------------------------------------------------------------------

def check_riesz(sigma: float = 2.0, K: int = pw.DEFAULT_RIESZ_TERMS) -> Result:
    weight_err = abs(pw.riesz_weight_total(sigma, K) - sigma)
    val = pw.riesz_scalar(sigma / 2, sigma, K)
    scalar_err = abs(val - (-1j * sigma / 2))
    bound = pw.riesz_tail_bound(sigma, K)
    # power identity on a spectrum with mu <= sigma
    grid = tr.build_spectral_grid(1.0, 16, 8)
    F = _random_band(grid, 1.0, np.random.default_rng(1))
    ident = pw.riesz_power_identity(F, sigma, 1, K)
    ok = weight_err <= 1e-10 and scalar_err <= bound
    return Result("4", "Riesz operator (series equals -i mu)", ok, scalar_err, bound,
                  {"weight_identity_error": weight_err, "scalar_error": scalar_err,
                   "tail_bound": bound, "R_vs_Laplacian": ident["vs_laplacian"],
                   "R_vs_i_Laplacian": ident["vs_i_laplacian"]})


# 5 -------------------------------------------------------------------------

def check_bandwidth(seed: int = 0) -> Result:
    # spike exactly at lambda = 3
    g3 = tr.SpectralGrid(np.array([1.0, 2.0, 3.0, 4.0]), np.ones(4), 8)
    vals = np.zeros(g3.shape, dtype=complex)
    vals[2, 0] = 1.0
    est = pw.bandwidth_estimate(tr.SpectralFunction(vals, g3), 40)
    spike_err = max(abs(est.omega_hat - 3.0), max(abs(r - 9.25) for r in est.ratios) / 9.25)
    _, fgrid = tr.reference_grids()
    heat = approx.heat_spectrum(fgrid)
    heat_ok = True
    gaps = {}
    for om in (2.0, 3.0, 4.0):
        est = pw.bandwidth_estimate(pw.pw_project(heat, om), 40)
        # nominal spacing; panel nodes cluster near panel ends
        spacing = fgrid.Lambda_max / fgrid.n_lambda
        gaps[om] = abs(est.omega_hat - om) / spacing
        heat_ok &= gaps[om] <= 1.0
    rng = np.random.default_rng(seed)
    mono = True
    for _ in range(50):
        est = pw.bandwidth_estimate(_random_full(fgrid, rng), 40)
        mono &= bool(np.all(np.diff(est.ratios) >= -1e-12 * np.abs(est.ratios[1:])))
    ok = spike_err <= 1e-12 and heat_ok and mono
    return Result("5", "Bandwidth characterization", ok, max(gaps.values()), 1.0,
                  {"spike_error": spike_err, "heat_gap_in_spacings": gaps, "monotone": mono})


# 6 -------------------------------------------------------------------------

def check_lattices(c: float = frames.DEFAULT_C, R: float = frames.DEFAULT_DOMAIN_RADIUS) -> Result:
    certs = {}
    ok = True
    worst = 0.0
    for om in ACCEPTANCE_OMEGAS:
        L = frames.cached_lattice(R, lattice.nyquist_radius(om, c), 0)
        cert = L.certificate
        certs[om] = cert.as_dict()
        ok &= cert.separated and cert.covering
        worst = max(worst, cert.covering_radius / (cert.r / 2), (cert.r / 2) / cert.min_pairwise)
    return Result("6", "Lattice separation and covering", ok, worst, 1.0, {"certificates": certs})


# 7 -------------------------------------------------------------------------

def check_frames(seed: int = 0, c: float = frames.DEFAULT_C, n: int = 20) -> Result:
    rng = np.random.default_rng(seed)
    detail = {}
    ok = True
    worst = 0.0
    for om in ACCEPTANCE_OMEGAS:
        fr = frames.build_frame(om, c)
        errs = []
        for _ in range(n):
            F = frames.random_band_spectrum(fr.grid, om, rng)
            rec = frames.dual_apply(fr.analysis.apply(F), fr)
            errs.append(tr.plancherel_norm(rec - F) / tr.plancherel_norm(F))
        tol = 1e-8 * fr.cond
        try:
            under = frames.build_frame(om, 2 * c)
            flagged = under.cond > 1e4
            under_cond = under.cond
        except frames.RankDeficient:
            flagged, under_cond = True, math.inf
        detail[om] = {"cond": fr.cond, "max_error": max(errs), "tol": tol,
                      "n_points": len(fr.lattice), "undersampled_cond": under_cond}
        ok &= fr.cond <= frames.MAX_COND and max(errs) <= tol and flagged
        worst = max(worst, max(errs) / tol)
    return Result("7", "Frame bounds and reconstruction", ok, worst, 1.0, detail)


# 8 -------------------------------------------------------------------------

def check_quadrature(seed: int = 0, c: float = frames.DEFAULT_C, n: int = 10) -> Result:
    sgrid, _ = tr.reference_grids()
    rng = np.random.default_rng(seed)
    detail = {}
    ok = True
    for om in ACCEPTANCE_OMEGAS:
        fr = frames.build_frame(om, c)
        rule = spatial_weights(Ball(0j, sgrid.R), fr, sgrid)
        full = spectral_weights(Band(0.0, om), fr)
        mid = fr.grid.lam[fr.analysis.n_band // 2]
        lo, hi = spectral_weights(Band(0.0, mid), fr), spectral_weights(Band(mid, om), fr)
        add = float(np.max(np.abs(lo.weights + hi.weights - full.weights)) / np.max(np.abs(full.weights)))
        sp, spec = [], []
        for _ in range(n):
            F = frames.random_band_spectrum(fr.grid, om, rng)
            samples = tr.inverse(F, fr.analysis.points)
            exact = complex(np.sum(tr.inverse(F, sgrid.points) * sgrid.weights))
            sp.append(abs(apply_rule(samples, rule) - exact) / abs(exact))
            target = complex(np.sum(F.values * F.grid.measure))
            spec.append(abs(apply_rule(samples, full) - target) / abs(target))
        detail[om] = {"spatial": max(sp), "spectral": max(spec), "additivity": add}
        ok &= max(sp) <= 1e-6 and max(spec) <= 1e-8 and add <= 1e-12
    v = max(d["spatial"] for d in detail.values())
    return Result("8", "Quadrature exactness", ok, v, 1e-6, detail)


# 9, 10 -----------------------------------------------------------------------

def check_jackson(seed: int = 0, n: int = 100) -> Result:
    _, fgrid = tr.reference_grids()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        F = _random_full(fgrid, rng)
        for r in (1, 2, 4):
            for t in (1.0, 2.0, 4.0):
                worst = max(worst, approx.jackson_check(F, t, r))
    return Result("9", "Jackson bound", worst <= 1 + 1e-12, worst, 1 + 1e-12)


def check_ksandwich(seed: int = 0, n: int = 200) -> Result:
    _, fgrid = tr.reference_grids()
    rng = np.random.default_rng(seed)
    worst = -math.inf
    ok = True
    for _ in range(n):
        F = _random_full(fgrid, rng)
        r = int(rng.integers(1, 4))
        for t in np.geomspace(1e-3, 1e2, 11):
            k2, ku = approx.k2_functional(F, t, r)
            ok &= k2 <= ku * (1 + 1e-15) and ku <= math.sqrt(2) * k2 + 1e-12
            worst = max(worst, ku / (math.sqrt(2) * k2))
    return Result("10", "K-functional sandwich", ok, worst, 1.0)


# 11, 12, 13 ------------------------------------------------------------------

def _heat_tail(om):
    return om + 10.0


def check_phi_vs_e(seed: int = 0) -> Result:
    cases = {"heat": (approx.heat_spectrum, _heat_tail)}
    for a in RATE_ALPHAS:
        cases[f"power{a}"] = (lambda g, a=a: approx.power_profile_spectrum(g, a), lambda om: 1e7)
    worst = 0.0
    detail = {}
    for name, (spec, tail) in cases.items():
        for E, phi, fr in approx.phi_sweep(spec, DYADIC, tail_max=tail, n_tail=128):
            F = spec(fr.grid)
            bound = 10 * fr.solver_tol * fr.cond * tr.plancherel_norm(F)
            worst = max(worst, abs(phi - E) / bound)
            detail[f"{name}@{fr.omega:g}"] = {"E": E, "Phi": phi, "bound": bound}
    rng = np.random.default_rng(seed)
    for om in ACCEPTANCE_OMEGAS:
        fr = frames.build_frame(om, frames.DEFAULT_C)
        F = frames.random_band_spectrum(fr.grid, om, rng)
        phi = approx.phi_error(F, om, fr)
        bound = 10 * fr.solver_tol * fr.cond * tr.plancherel_norm(F)
        worst = max(worst, phi / bound)
        detail[f"band@{om:g}"] = {"E": 0.0, "Phi": phi, "bound": bound}
    return Result("11", "Phi vs best approximation", worst <= 1.0, worst, 1.0, detail)


def rate_sweep(alpha: float, omegas=RATE_OMEGAS):
    spec = lambda g: approx.power_profile_spectrum(g, alpha)
    return approx.phi_sweep(spec, omegas, tail_max=1e7, n_tail=128)


def check_rates() -> Result:
    detail = {}
    worst = 0.0
    for a in RATE_ALPHAS:
        sw = rate_sweep(a)
        rep = approx.rate_fit(RATE_OMEGAS, [p for _, p, _ in sw])
        err = abs(rep.alpha_hat - a) / a
        worst = max(worst, err)
        detail[a] = {"alpha_hat": rep.alpha_hat, "relative_error": err, "residual": rep.residual}
    return Result("12", "Rate recovery from Phi", worst <= 0.05, worst, 0.05, detail)


def check_theorem52() -> Result:
    bgrid = tr.build_spectral_grid(16.0, 128, 8)
    base = approx.phi_sweep(approx.heat_spectrum, DYADIC, tail_max=_heat_tail, n_tail=128)
    ext = approx.phi_sweep(approx.heat_spectrum, DYADIC_EXTENDED, tail_max=_heat_tail, n_tail=128)
    detail = {}
    worst = 0.0
    ok = True
    for a, q in BESOV_CASES:
        params = approx.BesovParams(a, q, 2)
        r0 = approx.theorem52_functional(approx.heat_spectrum, params, DYADIC, bgrid, sweep=base)
        r1 = approx.theorem52_functional(approx.heat_spectrum, params, DYADIC, bgrid, sweep=base,
                                         n_s=2 * approx.N_S)
        r2 = approx.theorem52_functional(approx.heat_spectrum, params, DYADIC_EXTENDED, bgrid,
                                         sweep=ext)
        dev = max(abs(r1["C_hat"] / r0["C_hat"] - 1), abs(r2["C_hat"] / r0["C_hat"] - 1))
        ok &= math.isfinite(r0["C_hat"]) and r0["C_hat"] > 0 and dev <= 0.10
        worst = max(worst, dev)
        detail[f"{a},{q}"] = {"C_hat": r0["C_hat"], "s_doubled": r1["C_hat"],
                              "omega_extended": r2["C_hat"], "deviation": dev}
    return Result("13", "Dyadic Phi functional vs Besov norm", ok, worst, 0.10, detail)


CHECKS = {
    "1": check_plancherel, "2": check_laplacian, "3": check_bernstein, "4": check_riesz,
    "5": check_bandwidth, "6": check_lattices, "7": check_frames, "8": check_quadrature,
    "9": check_jackson, "10": check_ksandwich, "11": check_phi_vs_e, "12": check_rates,
    "13": check_theorem52,
}
FAST = ("3", "4", "5", "9", "10")


def run_suite(which: str = "all", report=None) -> list:
    keys = list(CHECKS) if which == "all" else list(FAST)
    out = []
    for k in keys:
        res = CHECKS[k]()
        if report is not None:
            report(res)
        out.append(res)
    return out
