import math

import numpy as np
import pytest

from hyperpw import paley_wiener as pw, transform as tr


def band_spectrum(grid, omega, rng):
    n = grid.band_count(omega)
    v = np.zeros(grid.shape, dtype=complex)
    v[:n] = rng.normal(size=(n, grid.n_b)) + 1j * rng.normal(size=(n, grid.n_b))
    return tr.SpectralFunction(v, grid)


@pytest.fixture(scope="module")
def grid():
    return tr.build_spectral_grid(16.0, 128, 16)


def test_projection_idempotent_and_contractive(grid, rng):
    F = tr.SpectralFunction(rng.normal(size=grid.shape) + 0j, grid)
    P = pw.pw_project(F, 4.0)
    assert np.array_equal(pw.pw_project(P, 4.0).values, P.values)
    norms = [tr.plancherel_norm(pw.pw_project(F, w)) for w in (16.0, 8.0, 4.0, 2.0, 1.0)]
    assert all(a >= b for a, b in zip(norms, norms[1:]))
    # tail-sum oracle
    e = np.sum(np.abs(F.values) ** 2 * grid.measure, axis=1)
    assert norms[2] ** 2 == pytest.approx(e[grid.lam < 4.0].sum(), rel=1e-13)
    assert np.array_equal(pw.pw_project(F, 16.0).values, F.values)


def test_projection_beyond_band_rejected(grid):
    F = tr.SpectralFunction(np.ones(grid.shape), grid)
    with pytest.raises(ValueError):
        pw.pw_project(F, 17.0)


def test_bernstein_direct_sum_oracle(grid, rng):
    for om in (2.0, 4.0, 8.0):
        F = band_spectrum(grid, om, rng)
        for s in (0.5, 1.0, 2.0, 5.0):
            e = np.sum(np.abs(F.values) ** 2 * grid.measure, axis=1)
            m = grid.lam ** 2 + 0.25
            direct = math.sqrt(np.sum(e * m ** (2 * s)) / np.sum(e)) / (om ** 2 + 0.25) ** s
            got = pw.bernstein_ratio(F, om, s)
            assert got == pytest.approx(direct, rel=1e-10)
            assert got <= 1 + 1e-12


def test_bernstein_requires_band_limit(grid, rng):
    with pytest.raises(pw.BandLimitError):
        pw.bernstein_ratio(band_spectrum(grid, 6.0, rng), 4.0, 1.0)


def test_log_power_norm_no_overflow(grid, rng):
    F = band_spectrum(grid, 16.0, rng)
    val = pw.log_power_norm(F, 40.0)
    assert np.isfinite(val) and val > 100


def test_bandwidth_single_spike():
    g = tr.SpectralGrid(np.array([1.0, 3.0, 5.0]), np.ones(3), 4)
    v = np.zeros(g.shape, dtype=complex)
    v[1, 2] = 2.0 - 1j
    est = pw.bandwidth_estimate(tr.SpectralFunction(v, g))
    assert est.omega_hat == pytest.approx(3.0, rel=1e-13)
    assert np.allclose(est.ratios, 9.25, rtol=1e-13)


def test_bandwidth_ratios_monotone(grid, rng):
    for _ in range(20):
        F = tr.SpectralFunction(rng.normal(size=grid.shape) * np.exp(-grid.lam)[:, None], grid)
        r = np.array(pw.bandwidth_estimate(F, 40).ratios)
        assert np.all(np.diff(r) >= -1e-12 * r[1:])
        assert r[-1] <= 16.0 ** 2 + 0.25


def test_bandwidth_rejects_bad_input(grid):
    with pytest.raises(ValueError):
        pw.bandwidth_estimate(tr.SpectralFunction(np.zeros(grid.shape), grid))
    with pytest.raises(ValueError):
        pw.bandwidth_estimate(tr.SpectralFunction(np.ones(grid.shape), grid), k_max=3)


def test_riesz_zero_and_pairing():
    assert pw.riesz_scalar(0.0, 2.0, 1000) == 0
    for m in (0.3, 1.0, 1.9):
        assert pw.riesz_scalar(m, 2.0, 2000) == pytest.approx(
            pw.riesz_scalar_direct(m, 2.0, 2000), abs=1e-13)


def test_riesz_series_equals_minus_i_mu():
    sigma, K = 2.0, 100_000
    mus = np.linspace(-sigma, sigma, 9)
    err = np.abs(pw.riesz_scalar(mus, sigma, K) + 1j * mus)
    assert np.all(err <= pw.riesz_tail_bound(sigma, K))


def test_riesz_weight_identity():
    for sigma in (0.5, 2.0, 7.0):
        assert pw.riesz_weight_total(sigma, 1000) == pytest.approx(sigma, abs=1e-10)


def test_riesz_power_identity_reports_i_factor(grid, rng):
    F = band_spectrum(grid, 1.0, rng)
    ident = pw.riesz_power_identity(F, 2.0, 1, 20_000)
    assert ident["vs_i_laplacian"] < 1e-3
    assert ident["vs_laplacian"] == pytest.approx(math.sqrt(2), rel=1e-3)
    ident2 = pw.riesz_power_identity(F, 2.0, 2, 20_000)
    assert ident2["vs_i_laplacian"] < 1e-3


def test_riesz_rejects_bad_parameters():
    with pytest.raises(ValueError):
        pw.riesz_scalar(1.0, 0.0, 1000)
    with pytest.raises(ValueError):
        pw.riesz_scalar(1.0, 1.0, 10)


def test_schrodinger_growth_bound(grid, rng):
    F = band_spectrum(grid, 3.0, rng)
    for z in (1.0, 0.5 + 2j, -1 - 0.3j, 50j):
        u, ratio = pw.schrodinger_extend(F, z, 3.0)
        assert ratio <= 1 + 1e-12
    u, ratio = pw.schrodinger_extend(F, 2.0, 3.0)
    assert tr.plancherel_norm(u) == pytest.approx(tr.plancherel_norm(F), rel=1e-12)


def test_schrodinger_group_law(grid, rng):
    F = band_spectrum(grid, 3.0, rng)
    a, b = 0.3 + 0.1j, -0.7 + 0.2j
    ab = tr.apply_multiplier(tr.apply_multiplier(F, pw.schrodinger_multiplier(a)),
                             pw.schrodinger_multiplier(b))
    direct = tr.apply_multiplier(F, pw.schrodinger_multiplier(a + b))
    assert np.allclose(ab.values, direct.values)


def test_moment_log_convexity(grid, rng):
    for _ in range(20):
        F = tr.SpectralFunction(rng.normal(size=grid.shape) + 0j, grid)
        for m, k in ((1, 2), (1, 3), (2, 5), (0.5, 4)):
            ok, slack = pw.moment_logconvexity_check(F, m, k)
            assert ok and slack <= 1 + 1e-12
    with pytest.raises(ValueError):
        pw.moment_logconvexity_check(F, 3, 2)


def spike(grid, i, k=0, value=1.0):
    v = np.zeros(grid.shape, dtype=complex)
    v[i, k] = value
    return tr.SpectralFunction(v, grid)


def test_bernstein_spike_values(grid):
    i = 10
    lam0 = grid.lam[i]
    for s in (0.5, 2.0):
        ratio = pw.bernstein_ratio(spike(grid, i), 4.0, s)
        assert ratio == pytest.approx(((lam0 ** 2 + 0.25) / 16.25) ** s, rel=1e-12)
    top = grid.band_count(4.0) - 1
    om = np.nextafter(grid.lam[top], np.inf)
    assert pw.bernstein_ratio(spike(grid, top), om, 3.0) == pytest.approx(1.0, rel=1e-12)


def test_schrodinger_spike_and_random(grid, rng):
    i = 12
    mu0 = grid.lam[i] ** 2 + 0.25
    u, ratio = pw.schrodinger_extend(spike(grid, i), 0.7j, 4.0)
    assert tr.plancherel_norm(u) / tr.plancherel_norm(spike(grid, i)) == pytest.approx(
        math.exp(0.7 * mu0), rel=1e-12)
    for _ in range(50):
        F = band_spectrum(grid, 4.0, rng)
        for x in np.linspace(-1, 1, 5):
            for y in np.linspace(-0.2, 0.2, 5):
                assert pw.schrodinger_extend(F, complex(x, y), 4.0)[1] <= 1 + 1e-12


def test_moment_equality_cases(grid, rng):
    F = tr.SpectralFunction(rng.normal(size=grid.shape) + 0j, grid)
    assert pw.moment_logconvexity_check(F, 0, 3)[1] == pytest.approx(1.0, rel=1e-12)
    assert pw.moment_logconvexity_check(F, 3, 3)[1] == pytest.approx(1.0, rel=1e-12)
    for m in (0.5, 1.0, 2.5):
        assert pw.moment_logconvexity_check(spike(grid, 20), m, 4)[1] == pytest.approx(1.0,
                                                                                      rel=1e-12)


def test_moment_inequality_direct_sums(grid, rng):
    m_all = grid.lam ** 2 + 0.25
    for _ in range(200):
        F = tr.SpectralFunction(rng.normal(size=grid.shape) * np.exp(-grid.lam / 2)[:, None],
                                grid)
        k = int(rng.integers(1, 9))
        m = int(rng.integers(0, k + 1))
        e = np.sum(np.abs(F.values) ** 2 * grid.measure, axis=1)
        lhs = math.sqrt(np.sum(e * m_all ** (2 * m)))
        rhs = (math.sqrt(np.sum(e * m_all ** (2 * k))) ** (m / k)
               * math.sqrt(np.sum(e)) ** (1 - m / k))
        assert lhs <= rhs * (1 + 1e-12)
        assert pw.moment_logconvexity_check(F, m, k)[0]
