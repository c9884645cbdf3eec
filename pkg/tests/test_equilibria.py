import math

import numpy as np
import pytest

from vortexsphere import equilibria as eq
from vortexsphere.equilibria import Classification, Family
from vortexsphere.errors import DegenerateStart
from vortexsphere.geometry import Params

from .oracles import EIG


def test_restpoint_curves_structure(unit):
    pts = eq.restpoint_curves(unit, 8)
    assert len(pts) == 16
    assert [p.family for p in pts[:8]] == [Family.P1] * 8
    for p in pts:
        assert p.residual < 1e-15
        assert p.classification is Classification.DEGENERATE_SADDLE
        assert p.location[0] == 0.0


def test_restpoints_at_alpha_zero(unit):
    p1 = eq.restpoint_at(0.0, Family.P1, unit)
    p2 = eq.restpoint_at(0.0, Family.P2, unit)
    assert p1.location == (0.0, 0.0, 0.0)
    assert p2.location == pytest.approx((0.0, 0.0, math.pi))
    assert p1.residual < 1e-15 and p2.residual < 1e-15
    shifted = eq.restpoint_at(1.3, Family.P1, unit)
    assert shifted.location == (0.0, 1.3, 1.3)


@pytest.mark.parametrize("family, sign", [(Family.P1, -1.0), (Family.P2, 1.0)])
def test_eigenvalues(unit, family, sign):
    for a in np.linspace(0, 2 * math.pi, 8, endpoint=False):
        p = eq.restpoint_at(a, family, unit)
        ev = sorted(p.eigenvalues, key=lambda v: abs(v))
        assert ev[0] == 0 and ev[1] == 0
        assert abs(ev[2] - sign * EIG) < 1e-5
        inner = Classification.ATTRACTOR if sign < 0 else Classification.REPELLER
        assert p.within_collision is inner


def test_eigenvector_along_alpha(unit):
    p = eq.restpoint_at(0.7, Family.P1, unit)
    v = p.eigenvector / np.linalg.norm(p.eigenvector)
    assert abs(abs(v[1]) - 1.0) < 1e-6


def test_eigenvalues_scale_with_gamma():
    p = eq.restpoint_at(0.4, Family.P2, Params(1.0, 2.0))
    assert max(v.real for v in p.eigenvalues) == pytest.approx(2 * EIG, abs=1e-5)


def test_manifold_dimensions(unit):
    d = eq.restpoint_at(0.0, Family.P1, unit).manifold_dimensions()
    assert d == {"unstable": 0, "stable": 1, "center": 2}


def test_collision_flow_has_no_other_restpoints(unit):
    assert eq.scan_collision_grid(unit, n=200) > 0.0


def test_heteroclinic(unit):
    orb = eq.verify_heteroclinic(0.0, math.pi / 2, unit)
    assert orb.max_error < 1e-8
    assert orb.psi_drift == 0.0
    assert orb.sink == (0.0, 0.0, 0.0)
    assert orb.source == pytest.approx((0.0, math.pi, 0.0))
    assert len(orb.samples) == 100


def test_heteroclinic_near_p2(unit):
    u0 = math.pi - 0.01
    orb = eq.verify_heteroclinic(1.0, u0, unit)
    assert orb.max_error < 1e-8
    # the decay carries the factor tan(u0/2) ~ 200
    assert abs(orb.alpha[-1] - 1.0) == pytest.approx(abs(eq.heteroclinic_closed_form(u0, 200.0, unit)), rel=1e-6)


def test_heteroclinic_degenerate(unit):
    with pytest.raises(DegenerateStart):
        eq.verify_heteroclinic(0.0, 0.0, unit)
    with pytest.raises(DegenerateStart):
        eq.verify_heteroclinic(0.0, math.pi, unit)


def test_transverse_stability(unit):
    assert eq.stability_transverse(Family.P1, unit).dr_dsigma > 0
    assert eq.stability_transverse(Family.P2, unit).dr_dsigma < 0
