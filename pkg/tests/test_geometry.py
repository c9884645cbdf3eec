import math

import numpy as np
import pytest

from vortexsphere import geometry as geo
from vortexsphere.errors import DomainError, NorthPole, OriginSingular
from vortexsphere.geometry import Params, PlanePoint, SpherePoint


def test_params_validation():
    with pytest.raises(DomainError):
        Params(-1.0, 1.0)
    with pytest.raises(DomainError):
        Params(1.0, 0.0)
    with pytest.raises(DomainError):
        Params(math.inf, 1.0)
    assert Params(2.0, 1.0).vortex_plane == (0.0, 4.0)


@pytest.mark.parametrize("sp, xyz", [
    ((0.0, 0.0), (0.0, 0.0, 0.0)),
    ((math.pi / 2, math.pi / 2), (0.0, 1.0, 1.0)),
    ((0.0, math.pi / 2), (1.0, 0.0, 1.0)),
])
def test_sphere_param(unit, sp, xyz):
    assert np.allclose(geo.sphere_param(SpherePoint(*sp), unit), xyz, atol=1e-15)


@pytest.mark.parametrize("xyz, xy", [
    ((0.0, 0.0, 0.0), (0.0, 0.0)),
    ((0.0, 1.0, 1.0), (0.0, 2.0)),
    ((1.0, 0.0, 1.0), (2.0, 0.0)),
])
def test_stereo_project(unit, xyz, xy):
    p = geo.stereo_project(xyz, unit)
    assert (p.x, p.y) == pytest.approx(xy, abs=1e-15)


def test_stereo_project_north_pole(unit):
    with pytest.raises(NorthPole):
        geo.stereo_project((0.0, 0.0, 2.0), unit)


@pytest.mark.parametrize("xy, sp", [
    ((0.0, 2.0), (math.pi / 2, math.pi / 2)),
    ((0.0, 0.0), (0.0, 0.0)),
    ((2.0, 0.0), (0.0, math.pi / 2)),
])
def test_stereo_inverse(unit, xy, sp):
    s = geo.stereo_inverse(PlanePoint(*xy), unit)
    assert (s.phi, s.theta) == pytest.approx(sp, abs=1e-15)


def test_projection_round_trip():
    P = Params(1.7, 1.0)
    rng = np.random.default_rng(3)
    for phi, theta in zip(rng.uniform(0, 2 * math.pi, 50), rng.uniform(0.01, 3.0, 50)):
        pt = SpherePoint(phi, theta)
        back = geo.stereo_inverse(geo.stereo_project(geo.sphere_param(pt, P), P), P)
        assert back.phi == pytest.approx(phi, abs=1e-12)
        assert back.theta == pytest.approx(theta, abs=1e-12)


@pytest.mark.parametrize("sp, c2", [
    ((math.pi / 2, math.pi / 2), 0.0),
    ((3 * math.pi / 2, math.pi / 2), 4.0),
    ((0.0, math.pi / 2), 2.0),
])
def test_chord_sq(unit, sp, c2):
    assert geo.chord_sq(SpherePoint(*sp), unit) == pytest.approx(c2, abs=1e-15)


def test_chord_matches_embedding():
    P = Params(1.3, 1.0)
    q = np.array([0.0, P.R, P.R])
    for phi, theta in [(0.3, 1.0), (2.0, 2.5), (4.0, 0.2)]:
        x = geo.sphere_param(SpherePoint(phi, theta), P)
        assert geo.chord_sq(SpherePoint(phi, theta), P) == pytest.approx(np.sum((x - q) ** 2), rel=1e-12)


def test_geodesic_distance():
    a = np.array([1.0, 0.0, 0.0])
    assert geo.geodesic_distance(a, a, 1.0) == 0.0
    assert geo.geodesic_distance(a, -a, 1.0) == pytest.approx(math.pi)
    assert geo.geodesic_distance(a, np.array([0.0, 1.0, 0.0]), 1.0) == pytest.approx(math.pi / 2)
    with pytest.raises(DomainError):
        geo.geodesic_distance(a, np.array([2.0, 0.0, 0.0]), 1.0)


def test_coeffs_xy_examples(unit):
    assert geo.coeffs_xy(PlanePoint(0.0, 2.0), unit).a == pytest.approx(1.0)
    origin = PlanePoint(0.0, 0.0)
    assert geo.l_xy(origin, unit) == pytest.approx(0.5)
    assert geo.b_xy(origin, unit) == pytest.approx(2.0)
    with pytest.raises(OriginSingular):
        geo.coeffs_xy(origin, unit)
    for x in (-3.0, 0.5, 7.0):
        assert geo.b_xy(PlanePoint(x, 0.0), unit) == pytest.approx(2.0)


def test_coeffs_xy_invariants():
    P = Params(0.8, 1.0)
    rng = np.random.default_rng(0)
    for x, y in rng.normal(scale=3.0, size=(500, 2)):
        c = geo.coeffs_xy(PlanePoint(x, y), P)
        assert c.al == pytest.approx(c.a * c.l, rel=1e-12)
        assert 0.0 <= c.b <= 4.0 * P.R**2 * (1 + 1e-14)
    # the maximum is attained at the antipode image (0, -2R)
    assert geo.b_xy(PlanePoint(0.0, -2 * P.R), P) == pytest.approx(4 * P.R**2)


def test_b_is_chord_squared():
    P = Params(1.2, 1.0)
    for phi, theta in [(0.3, 1.0), (2.0, 2.5), (4.0, 0.2)]:
        sp = SpherePoint(phi, theta)
        pp = geo.stereo_project(geo.sphere_param(sp, P), P)
        assert geo.b_xy(pp, P) == pytest.approx(geo.chord_sq(sp, P), rel=1e-12)


def test_coeff_grads_examples(unit):
    assert geo.l_b_grads_xy(PlanePoint(0.0, 0.0), unit)[0] == 0.0
    with pytest.raises(OriginSingular):
        geo.coeff_grads_xy(PlanePoint(0.0, 0.0), unit)
    assert geo.coeff_grads_xy(PlanePoint(0.0, 4.0), unit).b_y == pytest.approx(0.24, abs=1e-12)
    assert geo.coeff_grads_xy(PlanePoint(1.0, 0.0), unit).al_x == pytest.approx(-1.0, abs=1e-12)


def test_coeff_grads_match_finite_differences():
    P = Params(1.1, 1.0)
    d = 1e-6
    for x, y in [(0.7, -0.4), (-1.5, 3.0), (2.0, 0.1)]:
        g = geo.coeff_grads_xy(PlanePoint(x, y), P)

        def fd(name, dx, dy):
            hi = getattr(geo.coeffs_xy(PlanePoint(x + dx, y + dy), P), name)
            lo = getattr(geo.coeffs_xy(PlanePoint(x - dx, y - dy), P), name)
            return (hi - lo) / (2 * d)

        lb = geo.l_b_grads_xy(PlanePoint(x, y), P)
        assert lb == pytest.approx((g.l_x, g.l_y, g.b_x, g.b_y), rel=1e-14)
        for name in ("a", "al", "l", "b"):
            assert getattr(g, f"{name}_x") == pytest.approx(fd(name, d, 0), rel=1e-6, abs=1e-9)
            assert getattr(g, f"{name}_y") == pytest.approx(fd(name, 0, d), rel=1e-6, abs=1e-9)


def test_phi_functions():
    assert geo.phi1(1.0) == pytest.approx(0.36787944117144233)
    assert geo.phi1(0.0) == 0.0
    assert geo.phi1(1e-3) == 0.0
    assert geo.phi2(2.0) == 0.5
    r = 1.3
    fd = (geo.phi1(r + 1e-6) - geo.phi1(r - 1e-6)) / 2e-6
    assert geo.phi1_prime(r) == pytest.approx(fd, rel=1e-8)


def test_coeffs_mcgehee_collision_limits(unit):
    for alpha in (0.0, 1.0, 4.0):
        c = geo.coeffs_mcgehee(0.0, alpha, unit)
        assert (c.a, c.l, c.c) == pytest.approx((1.0, 0.125, 8.0))
        assert c.b == 0.0


def test_coeffs_mcgehee_example(unit):
    f = math.exp(-1.0)
    c = geo.coeffs_mcgehee(1.0, math.pi / 2, unit)
    assert c.b == pytest.approx(2 * f * f / (8 + f * f + 4 * f), rel=1e-12)


def test_coeffs_mcgehee_agree_with_plane():
    P = Params(0.9, 1.0)
    for r, alpha in [(0.6, 0.3), (1.5, 2.0), (3.0, 5.0)]:
        c = geo.coeffs_mcgehee(r, alpha, P)
        q = geo.mcgehee_to_xy(r, alpha, P)
        d = geo.coeffs_xy(q, P)
        assert (c.a, c.l, c.b) == pytest.approx((d.a, d.l, d.b), rel=1e-12)


def test_wrap_and_clamp():
    assert geo.wrap_angle(-1e-300) == pytest.approx(2 * math.pi) or geo.wrap_angle(-1e-300) == 0.0
    assert 0.0 <= geo.wrap_angle(-1e-18) < 2 * math.pi
    assert geo.wrap_angle(7.0) == pytest.approx(7.0 - 2 * math.pi)
    assert geo.clamp_theta(-1e-13) == 0.0
    with pytest.raises(DomainError):
        geo.clamp_theta(-0.1)
