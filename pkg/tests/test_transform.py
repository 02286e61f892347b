import math

import numpy as np
import pytest
from scipy.integrate import quad_vec

from hyperpw import transform as tr
from hyperpw.geometry import polar_to_point


def radial_oracle(f, lam, R=4.0, n_theta=4096):
    """int_{r<R} f(r) exp((-i lam + 1/2) <z, b>) dz for radial f, by direct quadrature."""
    th = 2 * np.pi * np.arange(n_theta) / n_theta

    def integrand(r):
        base = np.cosh(r) - np.sinh(r) * np.cos(th)
        ang = np.mean(base[None, :] ** (1j * lam[:, None] - 0.5), axis=1) * 2 * np.pi
        return f(r) * math.sinh(r) * ang

    return quad_vec(integrand, 0.0, R, epsabs=1e-13, epsrel=1e-11)[0]


def test_radial_transform_matches_spherical_oracle(ref_grids):
    sgrid, fgrid = ref_grids
    prof = lambda r: np.exp(-2.0 * r ** 2)
    f = tr.spatial_from_callable(sgrid, lambda z: prof(2 * np.arctanh(np.abs(z))))
    F = tr.forward(f, fgrid)
    idx = np.array([0, 10, 40, 80])
    ref = radial_oracle(prof, fgrid.lam[idx])
    assert np.allclose(F.values[idx], ref[:, None], rtol=1e-7, atol=1e-10)


def test_fft_path_matches_dense(small_grids):
    sgrid, fgrid = small_grids
    G = tr.calibration_family(fgrid)[2]
    pts = sgrid.points[::7, ::5]
    fast = tr.inverse_to_grid(G, sgrid).values[::7, ::5]
    assert np.allclose(fast, tr.inverse(G, pts), rtol=1e-10, atol=1e-12)
    f = tr.inverse_to_grid(G, sgrid)
    assert np.allclose(tr.forward(f, fgrid, check=False).values, tr.forward_dense(f, fgrid),
                       rtol=1e-9, atol=1e-12)


def test_round_trip_and_plancherel(ref_grids):
    sgrid, fgrid = ref_grids
    for G in tr.calibration_family(fgrid):
        f = tr.inverse_to_grid(G, sgrid)
        F = tr.forward(f, fgrid)
        assert tr.plancherel_norm(F - G) <= 1e-6 * tr.plancherel_norm(G)
        assert tr.plancherel_norm(F) == pytest.approx(tr.l2_norm(f), rel=1e-6)


def test_inner_product_preserved(ref_grids, rng):
    sgrid, fgrid = ref_grids
    G, H = (tr.random_bandlimited(fgrid, rng) for _ in range(2))
    g, h = tr.inverse_to_grid(G, sgrid), tr.inverse_to_grid(H, sgrid)
    spatial = np.sum(g.values * np.conj(h.values) * sgrid.weights)
    assert tr.plancherel_inner(G, H) == pytest.approx(spatial, rel=1e-5, abs=1e-8)


def test_laplacian_symbol_against_finite_differences(ref_grids, rng):
    _, fgrid = ref_grids
    G = tr.calibration_family(fgrid)[3]
    pts = polar_to_point(rng.uniform(0, 2, 20), rng.uniform(0, 2 * np.pi, 20))
    lap = tr.inverse(tr.apply_multiplier(G, tr.laplacian_symbol), pts)
    fd = tr.fd_laplacian(lambda z: tr.inverse(G, z), pts)
    assert np.linalg.norm(lap - fd) <= 1e-3 * np.linalg.norm(fd)


def test_fd_laplacian_on_known_function():
    # u = cosh d(0, z) has Laplacian 2u
    u = lambda z: (1 + np.abs(z) ** 2) / (1 - np.abs(z) ** 2)
    pts = polar_to_point(np.array([0.0, 0.5, 1.5]), np.array([0.0, 1.0, 2.0]))
    assert np.allclose(tr.fd_laplacian(u, pts), 2 * u(pts), rtol=1e-7)


def test_calibrated_plancherel_constant(ref_grids):
    sgrid, fgrid = ref_grids
    cal = tr.calibrate_plancherel(sgrid, fgrid)
    assert cal.c_P == pytest.approx(1 / (2 * math.pi), rel=1e-8)
    assert cal.max_mismatch < 1e-6


def test_ball_area(ref_grids):
    assert tr.ball_area_check(ref_grids[0]) < 1e-12


def test_boundary_mass_is_rejected(small_grids):
    sgrid, fgrid = small_grids
    f = tr.spatial_from_callable(sgrid, lambda z: np.ones_like(z))
    with pytest.raises(tr.BoundaryMassError):
        tr.forward(f, fgrid)


def test_angular_resolution_check():
    n = 64
    th = 2 * np.pi * np.arange(n) / n
    assert tr.check_angular_resolution(np.cos(3 * th)[None, :]) < 1e-20
    with pytest.raises(tr.AngularResolutionError):
        tr.check_angular_resolution(np.cos(32 * th)[None, :])


def test_grid_validation():
    with pytest.raises(ValueError):
        tr.build_spatial_grid(-1.0, 16, 16)
    with pytest.raises(ValueError):
        tr.build_spectral_grid(8.0, 64, 7)
    g = tr.build_spectral_grid(8.0, 64, 8)
    with pytest.raises(ValueError):
        tr.SpectralFunction(np.zeros((3, 8)), g)
    with pytest.raises(ValueError):
        tr.apply_multiplier(tr.SpectralFunction(np.ones(g.shape), g), lambda lam: np.full(lam.shape, np.nan))


def test_multiplier_composition(small_grids, rng):
    _, fgrid = small_grids
    G = tr.random_bandlimited(fgrid, rng)
    twice = tr.apply_multiplier(tr.apply_multiplier(G, tr.laplacian_symbol), tr.laplacian_symbol)
    once = tr.apply_multiplier(G, lambda lam: tr.laplacian_symbol(lam) ** 2)
    assert np.allclose(twice.values, once.values)


def naive_inverse(F, z):
    """Double loop over (lambda_i, b_k) with scalar arithmetic."""
    g = F.grid
    out = 0j
    for i, lam in enumerate(g.lam):
        w = g.p[i] * g.q[i] / g.n_b
        for k in range(g.n_b):
            th = 2 * math.pi * k / g.n_b
            B = math.log((1 - abs(z) ** 2) / abs(z - complex(math.cos(th), math.sin(th))) ** 2)
            out += F.values[i, k] * w * complex(math.exp(0.5 * B) * math.cos(lam * B),
                                                math.exp(0.5 * B) * math.sin(lam * B))
    return out


def test_inverse_matches_naive_double_sum(rng):
    fgrid = tr.build_spectral_grid(8.0, 32, 16)
    F = tr.random_bandlimited(fgrid, rng)
    pts = np.array([0j, 0.3 + 0.1j, -0.6j, 0.8 * np.exp(2j)])
    fast = tr.inverse(F, pts)
    ref = np.array([naive_inverse(F, z) for z in pts])
    assert np.allclose(fast, ref, rtol=1e-12, atol=1e-12 * np.abs(ref).max())


def test_grid_documented_values():
    g = tr.build_spatial_grid(3.0, 64, 32)
    assert g.weights.sum() == pytest.approx(2 * math.pi * (math.cosh(3) - 1), rel=1e-13)
    assert abs(g.refined().weights.sum() - g.weights.sum()) <= 1e-10
    assert g.points.size == 64 * 32 and np.all(np.abs(g.points) < 1)
    f = tr.build_spectral_grid(16.0, 128, 8)
    assert f.q.sum() == pytest.approx(16.0, abs=1e-10)
    assert np.all(np.diff(f.p) > 0) and f.lam[0] > 0


def test_linearity_and_trivial_cases(small_grids, rng):
    sgrid, fgrid = small_grids
    G, H = tr.random_bandlimited(fgrid, rng), tr.random_bandlimited(fgrid, rng)
    g, h = tr.inverse_to_grid(G, sgrid), tr.inverse_to_grid(H, sgrid)
    a, b = 1.5 - 0.5j, -0.25j
    lhs = tr.forward(a * g + b * h, fgrid, check=False).values
    rhs = a * tr.forward(g, fgrid, check=False).values + b * tr.forward(h, fgrid, check=False).values
    assert np.allclose(lhs, rhs, atol=1e-12 * np.abs(rhs).max())
    zero = tr.SpatialFunction(np.zeros(sgrid.shape), sgrid)
    assert np.all(tr.forward(zero, fgrid).values == 0)
    Z = tr.SpectralFunction(np.zeros(fgrid.shape), fgrid)
    assert np.all(tr.inverse(Z, sgrid.points[:3, :3]) == 0)
    assert tr.plancherel_norm(Z) == 0
    assert tr.plancherel_norm((2 - 1j) * G) == pytest.approx(abs(2 - 1j) * tr.plancherel_norm(G))
    assert np.array_equal(tr.apply_multiplier(G, lambda lam: np.ones_like(lam)).values, G.values)


def test_inverse_at_origin_of_radial_spectrum(small_grids):
    _, fgrid = small_grids
    F = tr.spectral_from_callable(fgrid, lambda L, T: np.exp(-L ** 2) + 0 * T)
    assert tr.inverse(F, np.array([0j]))[0] == pytest.approx(np.sum(F.values * fgrid.measure))


def test_calibration_converges_under_refinement(ref_grids):
    c1 = tr.calibrate_plancherel(*ref_grids)
    c2 = tr.calibrate_plancherel(*tr.reference_grids(scale=2))
    assert abs(c2.c_P / c1.c_P - 1) <= 1e-6
    assert c1.spread <= 1e-6 and c1.c_P > 0
