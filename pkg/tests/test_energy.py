import math

import numpy as np
import pytest

from vortexsphere import energy as en
from vortexsphere import geometry as geo
from vortexsphere.energy import RegimeKind, ZvmTopology
from vortexsphere.geometry import Params, PlanePoint

from .oracles import E_HAT_GENERIC, E_HAT_LIMIT, E_HAT_NEAR_COLLISION, H1, H2, R_STAR


def test_thresholds(unit):
    h1, h2 = en.thresholds(unit)
    assert h1 == pytest.approx(H1, abs=1e-15)
    assert h2 == pytest.approx(H2, abs=1e-15)
    assert en.thresholds(Params(0.5, 1.0))[1] == 0.0


def test_e_tilde_positive_above_h2(unit):
    rng = np.random.default_rng(2)
    for x, y in rng.normal(scale=4.0, size=(10_000, 2)):
        assert en.e_tilde(H2 + 1.0, PlanePoint(x, y), unit) > 0


def test_e_hat_oracles(unit):
    assert en.e_hat(0.1, 0.5, 0.3, unit) == pytest.approx(E_HAT_GENERIC, rel=1e-12)
    assert en.e_hat(-1.0, 1e-3, 1.0, unit) == pytest.approx(E_HAT_NEAR_COLLISION, rel=1e-12)
    assert en.e_hat_limit(unit) == pytest.approx(E_HAT_LIMIT, rel=1e-15)
    for alpha in np.linspace(0, 2 * math.pi, 13):
        assert abs(en.e_hat(0.3, 1e-3, alpha, unit) - 2 / math.pi) < 1e-4


def test_e_hat_limit_scaling():
    assert en.e_hat_limit(Params(2.0, 3.0)) == pytest.approx(2 * 3.0 * 4.0 / math.pi)


def test_e_hat_direct_agrees():
    P = Params(1.1, 0.9)
    for h, r, alpha in [(0.1, 0.5, 0.3), (-0.3, 1.5, 2.0), (0.0, 2.5, 4.5)]:
        assert en.e_hat(h, r, alpha, P) == pytest.approx(en.e_hat_direct(h, r, alpha, P), rel=1e-10)


def test_e_hat_partials_fd(unit):
    h, r, alpha = 0.05, 0.9, 1.1
    dr, da = en.e_hat_partials(h, r, alpha, unit)
    d = 1e-6
    assert dr == pytest.approx((en.e_hat(h, r + d, alpha, unit) - en.e_hat(h, r - d, alpha, unit)) / (2 * d), rel=1e-6)
    assert da == pytest.approx((en.e_hat(h, r, alpha + d, unit) - en.e_hat(h, r, alpha - d, unit)) / (2 * d), rel=1e-6, abs=1e-9)


def test_classify_examples(unit):
    assert en.classify(H2 + 0.5, unit).kind is RegimeKind.ALLOWED_EVERYWHERE
    mid = en.classify((H1 + H2) / 2, unit)
    assert mid.kind is RegimeKind.FORBIDDEN_DISK
    assert mid.disk.center[1] < 0 and mid.disk.contains(0.0, -2.0)
    low = en.classify(H1 - 0.5, unit)
    assert low.kind is RegimeKind.ALLOWED_DISK and low.disk.contains(0.0, 2.0)
    assert en.classify(H2, unit).kind is RegimeKind.BOUNDARY_H2
    assert en.classify(H1, unit).kind is RegimeKind.BOUNDARY_H1


@pytest.mark.parametrize("h", [H1 - 0.5, (H1 + H2) / 2, H2 + 0.5, H1 - 0.01, H2 - 0.001])
def test_classify_matches_sign_grid(unit, h):
    X, Y, E = en.sign_grid(h, unit, n=120)
    reg = en.classify(h, unit)
    mask = np.abs(E) > 1e-6
    pred = np.vectorize(lambda x, y: reg.allowed(x, y, unit))(X, Y)
    assert np.all(pred[mask] == (E[mask] > 0))


def test_level_circle_examples(unit):
    c = en.level_circle(4.0, unit)
    assert c.kind == "point" and c.center == pytest.approx((0.0, -2.0))
    assert en.level_circle(2.0, unit).kind == "line"
    c = en.level_circle(1.0, unit)
    assert c.center == pytest.approx((0.0, 4.0))
    assert c.radius == pytest.approx(2 * math.sqrt(3))
    for t in np.linspace(0, 2 * math.pi, 40):
        x = c.center[0] + c.radius * math.cos(t)
        y = c.center[1] + c.radius * math.sin(t)
        assert geo.b_xy(PlanePoint(x, y), unit) == pytest.approx(1.0, abs=1e-10)


def test_zvm_topologies(unit):
    assert en.zvm_curve(H2 + 0.1, unit).topology is ZvmTopology.EMPTY
    pt = en.zvm_curve(H2, unit)
    assert pt.topology is ZvmTopology.POINT_LIMIT
    assert (pt.r[0], pt.alpha[0]) == pytest.approx((R_STAR, 1.5 * math.pi), abs=1e-12)
    assert en.zvm_curve((H1 + H2) / 2, unit).topology is ZvmTopology.CLOSED_CURVE
    assert en.zvm_curve(H1, unit).topology is ZvmTopology.GRAPH_OVER_ALPHA


def test_zvm_graph_brackets_sign_change(unit):
    h = H1 - 0.2
    cv = en.zvm_curve(h, unit, n_samples=64)
    assert cv.topology is ZvmTopology.GRAPH_OVER_ALPHA
    for r, a in zip(cv.r, cv.alpha):
        assert en.e_hat(h, r * (1 - 1e-3), a, unit) > 0 > en.e_hat(h, r * (1 + 1e-3), a, unit)


def test_zvm_closed_curve_on_shell(unit):
    cv = en.zvm_curve((H1 + H2) / 2, unit, n_samples=64)
    assert np.max(np.abs(cv.residuals(unit))) < 1e-10


def test_zvm_restpoint(unit):
    r, a = en.zvm_restpoint(H2, unit)
    assert abs(geo.phi1(r) - 4.0) < 1e-12
    assert a == pytest.approx(1.5 * math.pi)
    assert en.zvm_restpoint(H2 + 0.1, unit) is None
    assert en.zvm_restpoint(H2 - 0.1, unit) is None
    # grad b vanishes there
    gx, gy = geo.log_b_grad_xy(PlanePoint(0.0, -2.0), unit)
    assert abs(gx) < 1e-15 and abs(gy) < 1e-15


def test_certify_absence(unit):
    rep = en.certify_zvm_restpoints(H2 - 0.1, unit)
    assert rep.point is None and rep.min_grad_log_b > 1e-3
    rep = en.certify_zvm_restpoints(H2 + 0.1, unit)
    assert rep.point is None and rep.n_samples == 0
