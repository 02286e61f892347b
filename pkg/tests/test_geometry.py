import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperpw.geometry import (BoundaryPoint, DiskPoint, ModelConstants, ball_area, busemann,
                              check_in_disk, dist, mobius_translate, point_to_polar,
                              polar_to_point)


def random_points(rng, n, rmax=3.0):
    return polar_to_point(rng.uniform(0, rmax, n), rng.uniform(0, 2 * np.pi, n))


def test_dist_matches_arccosh_form(rng):
    p, q = random_points(rng, 200), random_points(rng, 200)
    ref = np.arccosh(1 + 2 * np.abs(p - q) ** 2 / ((1 - np.abs(p) ** 2) * (1 - np.abs(q) ** 2)))
    assert np.allclose(dist(p, q), ref, rtol=1e-9, atol=1e-12)


def test_dist_from_origin_is_geodesic_radius(rng):
    r = rng.uniform(0, 5, 50)
    assert np.allclose(dist(0j, polar_to_point(r, rng.uniform(0, 6, 50))), r, rtol=1e-12)


def test_dist_metric_axioms(rng):
    p, q, s = (random_points(rng, 300) for _ in range(3))
    assert np.all(dist(p, p) == 0)
    assert np.allclose(dist(p, q), dist(q, p))
    assert np.all(dist(p, s) <= dist(p, q) + dist(q, s) + 1e-12)


def test_mobius_is_isometry(rng):
    a = complex(random_points(rng, 1)[0])
    p, q = random_points(rng, 100), random_points(rng, 100)
    assert np.allclose(dist(mobius_translate(a, p), mobius_translate(a, q)), dist(p, q),
                       rtol=1e-9)
    assert abs(mobius_translate(a, 0j) - a) < 1e-15


def test_busemann_is_limit_of_distance_differences(rng):
    # <z, b> = lim_{t -> inf} d(0, x_t) - d(z, x_t) along the ray to b
    z = random_points(rng, 20, 1.5)
    theta = rng.uniform(0, 2 * np.pi, 20)
    xt = polar_to_point(30.0, theta)
    limit = dist(0j, xt) - dist(z, xt)
    assert np.allclose(busemann(z, theta), limit, atol=1e-9)
    assert np.allclose(busemann(0j, theta), 0.0)
    assert busemann(0.3, BoundaryPoint(0.0)) == pytest.approx(busemann(0.3, 0.0))


def test_polar_round_trip(rng):
    r = rng.uniform(0.01, 5, 100)
    t = rng.uniform(0, 2 * np.pi, 100)
    r2, t2 = point_to_polar(polar_to_point(r, t))
    assert np.allclose(r2, r, rtol=1e-10) and np.allclose(t2, t)
    assert point_to_polar(0j) == (0.0, 0.0)


def test_ball_area_against_quadrature():
    from scipy.integrate import quad
    for R in (0.5, 2.0, 4.0):
        assert ball_area(R) == pytest.approx(quad(lambda r: 2 * math.pi * math.sinh(r), 0, R)[0],
                                             rel=1e-12)
    assert ball_area(1e-4) == pytest.approx(math.pi * 1e-8, rel=1e-6)


def test_invalid_points_rejected():
    with pytest.raises(ValueError):
        DiskPoint(1.0)
    with pytest.raises(ValueError):
        DiskPoint(complex("nan"))
    with pytest.raises(ValueError):
        check_in_disk([0.1, 1.2])
    with pytest.raises(ValueError):
        polar_to_point(-1.0, 0.0)
    with pytest.raises(ValueError):
        ModelConstants(c_P=-1.0)
    with pytest.raises(ValueError):
        ModelConstants(c_P=1.0, rho=1.0)
    assert BoundaryPoint(7.0).theta == pytest.approx(7.0 - 2 * math.pi)


radius = st.floats(0.0, 4.0)
angle = st.floats(0.0, 2 * math.pi)


@settings(max_examples=200, deadline=None)
@given(radius, angle, radius, angle, radius, angle)
def test_isometry_property(ra, ta, rp, tp, rq, tq):
    a, p, q = (complex(polar_to_point(r, t)) for r, t in ((ra, ta), (rp, tp), (rq, tq)))
    d = dist(p, q)
    assert dist(mobius_translate(a, p), mobius_translate(a, q)) == pytest.approx(d, rel=1e-7,
                                                                                abs=1e-7)
    assert d <= dist(p, 0j) + dist(0j, q) + 1e-12


def test_documented_values():
    from scipy.integrate import quad
    assert dist(0j, 0j) == 0
    line = quad(lambda t: 2 / (1 - t * t), 0, 0.5, epsabs=1e-14)[0]
    assert dist(0j, 0.5) == pytest.approx(line, rel=1e-13)
    assert dist(0j, 0.5) == pytest.approx(math.log(3), rel=1e-14)
    th = 1.1
    assert busemann(0.5 * np.exp(1j * th), th) == pytest.approx(math.log(3), rel=1e-14)
    assert mobius_translate(0j, 0.3 - 0.2j) == 0.3 - 0.2j
    assert polar_to_point(0.0, 2.0) == 0
    r, t = point_to_polar(polar_to_point(1.0, 0.3))
    assert abs(r - 1.0) < 1e-12 and abs(t - 0.3) < 1e-12


def test_busemann_cocycle_under_isometries(rng):
    # <T_a z, T_a b> = <z, b> + <a, T_a b> for the disk isometry T_a
    for _ in range(20):
        a = complex(random_points(rng, 1, 2.0)[0])
        z = random_points(rng, 30, 2.0)
        th = rng.uniform(0, 2 * np.pi, 30)
        gb = np.angle(mobius_translate(a, np.exp(1j * th)))
        lhs = busemann(mobius_translate(a, z), gb)
        rhs = busemann(z, th) + busemann(a, gb)
        assert np.allclose(lhs, rhs, atol=1e-10)
