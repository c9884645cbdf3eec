import math

import numpy as np
import pytest

from vortexsphere import dynamics as dyn
from vortexsphere import kernels
from vortexsphere.dynamics import VortexAt
from vortexsphere.geometry import Params

P = Params(1.3, 0.8)

STATES = {
    "plane": [0.7, -0.4, 0.3, 0.5],
    "sphere-north": [0.4, 2.0, 0.3, -0.2],
    "sphere-equator": [0.4, 1.1, 0.3, -0.2],
    "sphere-geodesic": [0.4, 1.1, 0.3, -0.2],
    "meridian": [1.2, 0.4],
    "mcgehee-tau": [0.8, 1.2, 0.3, -0.5],
    "collision": [0.3, 1.9],
}

REFERENCE = {
    "plane": lambda y: dyn.vf_plane(y, P),
    "sphere-north": lambda y: dyn.vf_sphere_vortex(y, P, VortexAt.NORTH_POLE),
    "sphere-equator": lambda y: dyn.vf_sphere_vortex(y, P, VortexAt.EQUATOR),
    "sphere-geodesic": lambda y: dyn.vf_sphere_geodesic(y, P),
    "meridian": lambda y: dyn.vf_meridian(y, P),
    "mcgehee-tau": lambda y: dyn.vf_mcgehee_tau(y, P),
    "collision": lambda y: np.array(dyn.vf_collision_manifold(y[0], y[1], P)),
}


def _backends():
    out = [kernels.backend("python")]
    try:
        out.append(kernels.backend("cython"))
    except ImportError:
        pass
    return out


@pytest.mark.parametrize("mod", _backends(), ids=lambda m: m.BACKEND)
@pytest.mark.parametrize("name", list(STATES))
def test_rhs_matches_reference_field(mod, name):
    y = np.array(STATES[name], dtype=float)
    got = mod.rhs(kernels.KINDS[name], P.R, P.Gamma, y)
    assert np.asarray(got) == pytest.approx(REFERENCE[name](y), rel=1e-13, abs=1e-16)


@pytest.mark.parametrize("name", list(STATES))
def test_backends_agree(name):
    mods = _backends()
    if len(mods) < 2:
        pytest.skip("compiled kernels not built")
    py, cy = mods
    k = kernels.KINDS[name]
    y = np.array(STATES[name], dtype=float)
    f0 = np.asarray(py.rhs(k, P.R, P.Gamma, y))
    a = py.dp45_step(k, P.R, P.Gamma, y, f0, 0.01)
    b = cy.dp45_step(k, P.R, P.Gamma, y, f0, 0.01)
    for u, v in zip(a, b):
        assert np.asarray(u) == pytest.approx(np.asarray(v), rel=1e-14, abs=1e-17)
    ra = py.rk4_run(k, P.R, P.Gamma, y, 0.01, 50)
    rb = cy.rk4_run(k, P.R, P.Gamma, y, 0.01, 50)
    assert np.asarray(ra) == pytest.approx(np.asarray(rb), rel=1e-13, abs=1e-16)


@pytest.mark.parametrize("mod", _backends(), ids=lambda m: m.BACKEND)
def test_singular_state_gives_nan(mod):
    y = np.array([0.0, 2.0 * P.R, 0.1, 0.1])
    assert np.all(np.isnan(np.asarray(mod.rhs(kernels.KINDS["plane"], P.R, P.Gamma, y))))
    y = np.array([0.3, 0.0, 1.0, 0.0])
    assert np.any(np.isnan(np.asarray(mod.rhs(kernels.KINDS["sphere-geodesic"], P.R, P.Gamma, y))))


@pytest.mark.parametrize("mod", _backends(), ids=lambda m: m.BACKEND)
def test_rk4_step_matches_run(mod):
    k = kernels.KINDS["meridian"]
    y = np.array(STATES["meridian"])
    one = mod.rk4_step(k, P.R, P.Gamma, y, 0.05)
    run = mod.rk4_run(k, P.R, P.Gamma, y, 0.05, 1)
    assert np.asarray(one) == pytest.approx(np.asarray(run), rel=1e-15)
    two = mod.rk4_step(k, P.R, P.Gamma, np.asarray(one), 0.05)
    assert np.asarray(mod.rk4_run(k, P.R, P.Gamma, y, 0.05, 2)) == pytest.approx(np.asarray(two), rel=1e-15)


@pytest.mark.parametrize("mod", _backends(), ids=lambda m: m.BACKEND)
def test_dp45_is_fsal(mod):
    k = kernels.KINDS["plane"]
    y = np.array(STATES["plane"])
    f0 = np.asarray(mod.rhs(k, P.R, P.Gamma, y))
    y5, err, f5 = mod.dp45_step(k, P.R, P.Gamma, y, f0, 0.02)
    assert np.asarray(f5) == pytest.approx(np.asarray(mod.rhs(k, P.R, P.Gamma, np.asarray(y5))), rel=1e-15)
    assert np.max(np.abs(err)) < 1e-6


def test_backend_selection():
    assert kernels.BACKEND in ("python", "cython")
    with pytest.raises(ValueError):
        kernels.backend("fortran")
    assert math.isfinite(kernels.rhs(kernels.KINDS["collision"], 1.0, 1.0, np.array([0.0, 1.0]))[0])
