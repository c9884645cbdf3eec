import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from vortexsphere import dynamics as dyn
from vortexsphere import geometry as geo
from vortexsphere.charts import Chart, ChartState, mcgehee_to_plane, phi1_inverse, plane_to_mcgehee
from vortexsphere.energy import classify, e_tilde
from vortexsphere.geometry import Params, PlanePoint, SpherePoint

radii = st.floats(0.2, 5.0)
gammas = st.floats(0.1, 5.0)
coords = st.floats(-8.0, 8.0)


@given(st.floats(0.0, 2 * math.pi), st.floats(1e-3, math.pi - 1e-3), radii)
def test_projection_round_trip(phi, theta, R):
    P = Params(R, 1.0)
    back = geo.stereo_inverse(geo.stereo_project(geo.sphere_param(SpherePoint(phi, theta), P), P), P)
    assert abs(back.theta - theta) < 1e-9
    assert abs(math.remainder(back.phi - phi, 2 * math.pi)) < 1e-9 / math.sin(theta)


@given(coords, coords, radii)
def test_b_range(x, y, R):
    b = geo.b_xy(PlanePoint(x, y), Params(R, 1.0))
    assert 0.0 <= b <= 4 * R * R * (1 + 1e-12)


@given(st.floats(1e-8, 1e3))
def test_phi1_inverse(v):
    assert abs(geo.phi1(phi1_inverse(v)) - v) <= 1e-12 * v


@given(st.floats(-0.5, 0.5), coords, coords, radii, gammas)
@settings(max_examples=200)
def test_classify_agrees_with_sign(h, x, y, R, G):
    P = Params(R, G)
    if x == 0.0 and y == 2 * R:
        return
    E = e_tilde(h, PlanePoint(x, y), P)
    if abs(E) > 1e-9:
        assert classify(h, P).allowed(x, y, P) == (E > 0)


@given(coords, coords, st.floats(-3, 3), st.floats(-3, 3))
def test_plane_mcgehee_round_trip(x, y, px, py):
    P = Params()
    if math.hypot(x, y - 2.0) < 0.05:
        return
    s = ChartState(Chart.PLANE, (x, y, px, py))
    back = mcgehee_to_plane(plane_to_mcgehee(s, P), P)
    assert np.allclose(back.as_array(), s.as_array(), rtol=1e-9, atol=1e-9)


@given(st.floats(0.0, 2 * math.pi), st.floats(0.0, 2 * math.pi), gammas)
def test_collision_flow_keeps_psi(alpha, psi, G):
    a, p = dyn.vf_collision_manifold(alpha, psi, Params(1.0, G))
    assert p == 0.0
    assert abs(a) <= G / (4 * math.pi) + 1e-15


@given(st.floats(0.05, 3.1), st.floats(-2, 2), gammas)
def test_meridian_field_is_odd(theta, p, G):
    P = Params(1.0, G)
    f = dyn.vf_meridian([theta, p], P)
    g = dyn.vf_meridian([-theta, -p], P)
    assert np.allclose(f, -g, rtol=1e-14, atol=0)
