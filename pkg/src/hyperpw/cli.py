"""Command-line front end.

    hyperpw <command> [--config PATH] [--out DIR] [--omega W] [--seed N]
                      [--input PATH] [--dump-duals] [--suite all|fast]

Exit codes: 0 success, 1 failed invariant, 2 I/O or configuration error.
Diagnostics go to standard error; reports are written under --out.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import approx, frames, lattice, paley_wiener as pw, suite, transform as tr
from .io import (ConfigError, RunConfig, csv_kind, fmt, read_samples_csv, read_spatial_csv,
                 read_spectral_csv, write_json, write_lattice_csv, write_rows, write_samples_csv,
                 write_spatial_csv, write_spectral_csv, write_weights_csv)
from .quadrature import (Ball, RegionError, apply_rule, ball_mask, region_from_dict,
                         spatial_weights, spectral_weights)

COMMANDS = ("transform", "project", "lattice", "frame", "reconstruct", "quadrature", "rates",
            "theorem52", "check", "calibrate", "bench")


class InvariantFailure(RuntimeError):
    """A computed result violates its certified bound."""


# -- helpers ------------------------------------------------------------------

def _grids(cfg: RunConfig):
    s = tr.build_spatial_grid(cfg.R, cfg.n_r, cfg.n_theta)
    f = tr.build_spectral_grid(cfg.Lambda_max, cfg.n_lambda, cfg.n_b, cfg.c_P)
    return s, f


def _input(cfg: RunConfig) -> Path:
    path = cfg.paths.get("input")
    if not path:
        raise ConfigError("no input file: pass --input or set paths.input in the config")
    return Path(path)


def _lattice_params(cfg: RunConfig):
    """(R, r, c) for the configured lattice; r wins over c when both are given."""
    R = float(cfg.lattice.get("R", frames.DEFAULT_DOMAIN_RADIUS))
    c = float(cfg.lattice.get("c", frames.DEFAULT_C))
    r = cfg.lattice.get("r")
    r = lattice.nyquist_radius(cfg.omega, c) if r is None else float(r)
    return R, r, c


def _frame(cfg: RunConfig) -> frames.FrameSystem:
    R, r, c = _lattice_params(cfg)
    tol = float(cfg.solver.get("tol", frames.DEFAULT_SOLVER_TOL))
    grid = frames.band_grid(cfg.omega, R, cfg.c_P)
    L = frames.cached_lattice(R, r, cfg.seed)
    return frames.certify_frame(L, cfg.omega, grid, tol, c)


# -- commands -------------------------------------------------------------------

def cmd_transform(cfg, args, out: Path) -> int:
    """Forward transform of a spatial CSV, or inverse of a spectral CSV."""
    sgrid, fgrid = _grids(cfg)
    path = _input(cfg)
    kind = csv_kind(path)
    if kind == "spatial":
        F = tr.forward(read_spatial_csv(path, sgrid), fgrid)
        write_spectral_csv(out / "spectral.csv", F)
    elif kind == "spectral":
        f = tr.inverse_to_grid(read_spectral_csv(path, fgrid), sgrid)
        write_spatial_csv(out / "spatial.csv", f)
    else:
        raise ConfigError(f"{path}: transform needs a spatial or spectral CSV, got {kind}")
    return 0


def cmd_project(cfg, args, out: Path) -> int:
    """Project onto the band lambda < omega."""
    sgrid, fgrid = _grids(cfg)
    path = _input(cfg)
    kind = csv_kind(path)
    if kind == "spatial":
        F = tr.forward(read_spatial_csv(path, sgrid), fgrid)
    elif kind == "spectral":
        F = read_spectral_csv(path, fgrid)
    else:
        raise ConfigError(f"{path}: project needs a spatial or spectral CSV, got {kind}")
    write_spectral_csv(out / "projected.csv", pw.pw_project(F, cfg.omega))
    return 0


def cmd_lattice(cfg, args, out: Path) -> int:
    """Build and certify a sampling lattice."""
    R, r, _ = _lattice_params(cfg)
    L = lattice.build_lattice(R, r, cfg.seed)
    write_lattice_csv(out / "lattice.csv", L.points)
    cert = L.certificate
    write_json(out / "certificate.json", cert.as_dict())
    if not (cert.separated and cert.covering):
        raise InvariantFailure(f"lattice certificate failed: {cert.as_dict()}")
    return 0


def cmd_frame(cfg, args, out: Path) -> int:
    """Certify the sampling frame at omega and report its bounds."""
    fr = _frame(cfg)
    write_json(out / "frame.json", fr.report())
    write_lattice_csv(out / "lattice.csv", fr.analysis.points)
    if args.dump_duals:
        for j, theta in enumerate(frames.dual_frame_functions(fr)):
            write_spectral_csv(out / "duals" / f"dual_{j:05d}.csv", theta)
    if fr.cond > frames.MAX_COND:
        raise InvariantFailure(f"frame condition {fr.cond:.3e} exceeds {frames.MAX_COND:g}")
    return 0


def cmd_reconstruct(cfg, args, out: Path) -> int:
    """Reconstruct a band-limited spectrum from lattice samples."""
    fr = _frame(cfg)
    pts = fr.analysis.points
    report = {"frame": fr.report()}
    if cfg.paths.get("input"):
        path = _input(cfg)
        if csv_kind(path) != "samples":
            raise ConfigError(f"{path}: reconstruct needs a samples CSV (id,x,y,re,im)")
        spts, samples = read_samples_csv(path)
        if spts.size != pts.size or np.max(np.abs(spts - pts)) > 1e-9:
            raise ConfigError(f"{path}: sample points do not match the configured lattice")
        F = frames.dual_apply(samples, fr)
        resid = np.linalg.norm(fr.analysis.apply(F) - samples) / np.linalg.norm(samples)
        report["sample_residual"] = float(resid)
    else:
        # self-test: random band-limited spectrum, sampled and reconstructed
        rng = np.random.default_rng(cfg.seed)
        G = frames.random_band_spectrum(fr.grid, cfg.omega, rng)
        samples = fr.analysis.apply(G)
        write_samples_csv(out / "samples.csv", pts, samples)
        F = frames.dual_apply(samples, fr)
        err = tr.plancherel_norm(F - G) / tr.plancherel_norm(G)
        report.update(relative_error=err, tolerance=1e-8 * fr.cond)
    write_spectral_csv(out / "reconstruction.csv", F)
    write_json(out / "reconstruct.json", report)
    if "relative_error" in report and report["relative_error"] > report["tolerance"]:
        raise InvariantFailure(f"reconstruction error {report['relative_error']:.3e} "
                               f"exceeds {report['tolerance']:.3e}")
    return 0


def cmd_quadrature(cfg, args, out: Path) -> int:
    """Quadrature weights for the configured region."""
    sgrid, _ = _grids(cfg)
    fr = _frame(cfg)
    region = region_from_dict(cfg.region)
    if isinstance(region, Ball):
        rule = spatial_weights(region, fr, sgrid)
    else:
        rule = spectral_weights(region, fr)
    write_weights_csv(out / "weights.csv", rule.weights)
    # certify on one random band-limited function
    rng = np.random.default_rng(cfg.seed)
    F = frames.random_band_spectrum(fr.grid, cfg.omega, rng)
    got = apply_rule(fr.analysis.apply(F), rule)
    if isinstance(region, Ball):
        mask = ball_mask(region, sgrid)
        exact = complex(np.sum(tr.inverse(F, sgrid.points[mask]) * sgrid.weights[mask]))
        tol = 1e-6
    else:
        lam = fr.grid.lam[: fr.analysis.n_band]
        sel = (lam >= region.lo) & (lam < region.hi)
        exact = complex(np.sum((F.values * F.grid.measure)[: fr.analysis.n_band][sel]))
        tol = 1e-8
    err = abs(got - exact) / max(abs(exact), 1e-300)
    write_json(out / "quadrature.json", {"region": region.as_dict(), "n_points": len(rule),
                                         "test_relative_error": err, "tolerance": tol,
                                         "frame": fr.report()})
    if err > tol:
        raise InvariantFailure(f"quadrature error {err:.3e} exceeds {tol:.0e}")
    return 0


def cmd_rates(cfg, args, out: Path) -> int:
    """Phi and E over an omega sweep, with the fitted decay rate."""
    alpha = float(cfg.rates.get("alpha", 1.25))
    omegas = [float(w) for w in cfg.rates.get("omegas", suite.RATE_OMEGAS)]
    sweep = suite.rate_sweep(alpha, omegas)
    rows = [[w, E, phi] for w, (E, phi, _) in zip(omegas, sweep)]
    write_rows(out / "rates.csv", ["omega", "E", "Phi"],
                ([fmt(a), fmt(b), fmt(c)] for a, b, c in rows))
    rep = approx.rate_fit(omegas, [r[2] for r in rows])
    write_json(out / "rate_fit.json", {"alpha": alpha, "alpha_hat": rep.alpha_hat,
                                       "relative_error": abs(rep.alpha_hat - alpha) / alpha,
                                       "residual": rep.residual, "omegas": omegas})
    return 0


def cmd_theorem52(cfg, args, out: Path) -> int:
    """Dyadic Phi functional against the Besov norm."""
    b = cfg.besov
    params = approx.BesovParams(float(b.get("alpha", 1.0)), float(b.get("q", 2.0)),
                                int(b.get("r", 2)))
    bgrid = tr.build_spectral_grid(cfg.Lambda_max, cfg.n_lambda, 8, cfg.c_P)
    res = approx.theorem52_functional(approx.heat_spectrum, params, suite.DYADIC, bgrid,
                                      tail_max=lambda om: om + 10.0, n_tail=128)
    write_json(out / "theorem52.json", res)
    if not (math.isfinite(res["C_hat"]) and res["C_hat"] > 0):
        raise InvariantFailure(f"C_hat = {res['C_hat']} is not finite and positive")
    return 0


def cmd_check(cfg, args, out: Path) -> int:
    """Run the invariant suite."""
    results = suite.run_suite(args.suite, report=lambda r: print(r.line(), flush=True))
    write_json(out / "check.json", {r.key: {"title": r.title, "passed": r.passed,
                                            "value": r.value, "threshold": r.threshold,
                                            "detail": r.detail} for r in results})
    failed = [r.key for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed", flush=True)
    if failed:
        raise InvariantFailure(f"failed checks: {', '.join(failed)}")
    return 0


def cmd_calibrate(cfg, args, out: Path) -> int:
    """Calibrate the Plancherel constant and the sampling constant."""
    sgrid, fgrid = _grids(cfg)
    cal = tr.calibrate_plancherel(sgrid, fgrid)
    samp = frames.calibrate_sampling_constant(tuple(cfg.omegas))
    write_json(out / "calibration.json", {
        "c_P": cal.c_P, "c_P_spread": cal.spread, "c_P_max_mismatch": cal.max_mismatch,
        "c": samp.c, "conds": {f"{k:g}": v for k, v in samp.conds.items()},
        "history": [{"c": c, "conds": {f"{k:g}": v for k, v in d.items()}}
                    for c, d in samp.history]})
    return 0


def _timed(fn, repeat=3):
    best = math.inf
    for _ in range(repeat):
        t = time.perf_counter()
        val = fn()
        best = min(best, time.perf_counter() - t)
    return best, val


def cmd_bench(cfg, args, out: Path) -> int:
    """Time the transform, assembly and solver kernels."""
    sgrid, fgrid = _grids(cfg)
    G = tr.calibration_family(fgrid)[0]
    rows = []
    t, f = _timed(lambda: tr.inverse_to_grid(G, sgrid))
    rows.append(("inverse_to_grid", t, sgrid.points.size * fgrid.lam.size * fgrid.n_b))
    t, _ = _timed(lambda: tr.forward(f, fgrid))
    rows.append(("forward", t, sgrid.points.size * fgrid.lam.size * fgrid.n_b))
    R, r, c = _lattice_params(cfg)
    L = frames.cached_lattice(R, r, cfg.seed)
    grid = frames.band_grid(cfg.omega, R, cfg.c_P)
    t, E = _timed(lambda: frames.assemble_analysis(L, cfg.omega, grid))
    rows.append(("assemble_analysis", t, E.shape[0] * E.shape[1]))
    t, (A, B) = _timed(lambda: frames.frame_bounds(E), 1)
    rows.append(("frame_bounds", t, E.shape[1] ** 2))
    fr = frames.FrameSystem(E, A, B, cfg.omega, L, frames.DEFAULT_SOLVER_TOL, c)
    y = E.apply(frames.random_band_spectrum(grid, cfg.omega, np.random.default_rng(cfg.seed)))
    S = frames.gram(E)
    t, (_, _, its) = _timed(lambda: frames.conjugate_gradient(
        lambda v: S @ v, E.whitened.conj().T @ y, fr.solver_tol, 10 * fr.dim))
    rows.append(("cg_dual_apply", t, its * E.shape[1] ** 2))
    write_rows(out / "bench.csv", ["kernel", "seconds", "ops"],
                ([k, fmt(s), str(int(n))] for k, s, n in rows))
    return 0


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


# -- entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", default=".", help="output directory (default: .)")
    common.add_argument("--omega", type=float, help="band limit, overrides the config")
    common.add_argument("--seed", type=int, help="random seed, overrides the config")
    common.add_argument("--input", help="input CSV, overrides paths.input")
    common.add_argument("--dump-duals", action="store_true",
                        help="frame: write each dual spectrum as a CSV")
    common.add_argument("--suite", choices=("all", "fast"), default="all",
                        help="check: which invariants to run")
    p = argparse.ArgumentParser(prog="hyperpw", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=HANDLERS[name].__doc__)
    return p


def _configure(args) -> RunConfig:
    cfg = RunConfig.load(args.config)
    if args.omega is not None:
        cfg.omega = args.omega
    if args.seed is not None:
        cfg.seed = args.seed
    if args.input is not None:
        cfg.paths = dict(cfg.paths, input=args.input)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        cfg = _configure(args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return HANDLERS[args.command](cfg, args, out)
    except (InvariantFailure, frames.RankDeficient, frames.SolverError, pw.BandLimitError,
            tr.BoundaryMassError, tr.AngularResolutionError, tr.CalibrationError) as exc:
        print(f"hyperpw {args.command}: invariant failed: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"hyperpw {args.command}: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, RegionError, lattice.LatticeError, frames.FrameError, OSError,
            ValueError, KeyError, TypeError) as exc:
        print(f"hyperpw {args.command}: configuration or I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
