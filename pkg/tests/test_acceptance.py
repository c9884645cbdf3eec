"""Acceptance criteria 1-12 at their pinned tolerances.

Each check returns ``(ok, detail)``; the test asserts ``ok`` and records one
summary line, printed at the end of the pytest run (or by running this file
directly).
"""
import math

import numpy as np
import pytest

from vortexsphere import diagnostics, energy, equilibria, geometry
from vortexsphere import dynamics as dyn
from vortexsphere import global_orbits as go
from vortexsphere.equilibria import Family
from vortexsphere.errors import NoOrbit
from vortexsphere.geometry import Params
from vortexsphere.integrator import EventKind, IntegratorOptions, integrate, monitor_angular_momentum, monitor_energy

P = Params(1.0, 1.0)
TIGHT = IntegratorOptions(rel_tol=1e-12, abs_tol=1e-14)
RESULTS: dict[int, str] = {}


def check_1():
    h1, h2 = energy.thresholds(P)
    e1 = abs(h1 - math.log(2) / (8 * math.pi))
    e2 = abs(h2 - math.log(2) / (4 * math.pi))
    return max(e1, e2) < 1e-12, f"h1={h1:.15g} h2={h2:.15g} err={max(e1, e2):.1e}"


def check_2():
    h1, h2 = energy.thresholds(P)
    worst = 1.0
    for h in (h1 - 0.5, 0.5 * (h1 + h2), h2 + 0.5):
        X, Y, E = energy.sign_grid(h, P, n=200, half_width=6.0)
        reg = energy.classify(h, P)
        pred = np.vectorize(lambda x, y: reg.allowed(x, y, P))(X, Y)
        mask = np.abs(E) > 1e-6
        worst = min(worst, float(np.mean(pred[mask] == (E[mask] > 0))))
    return worst == 1.0, f"agreement={100 * worst:.2f}% of decided cells"


def check_3():
    L0 = energy.e_hat_limit(P)
    alphas = np.linspace(0, 2 * math.pi, 64, endpoint=False)
    dev = max(abs(energy.e_hat(h, 1e-3, a, P) - L0) for h in (-1.0, 0.0, 1.0) for a in alphas)
    spread = max(abs(energy.e_hat(h, 1e-4, a, P) - energy.e_hat(0.0, 1e-4, a, P))
                 for h in (-1.0, 1.0) for a in alphas)
    ok = dev < 1e-4 and spread < 1e-6
    return ok, f"L0={L0:.12g} max|E-L0|={dev:.1e} h-spread={spread:.1e}"


def check_4():
    g = P.Gamma / (4 * math.pi)
    worst = 0.0
    zero_ok = True
    for fam, sign in ((Family.P1, -1.0), (Family.P2, 1.0)):
        for a in np.linspace(0, 2 * math.pi, 8, endpoint=False):
            rep = equilibria.jacobian_eigs(equilibria.restpoint_at(a, fam, P).location, P)
            ev = sorted(rep.eigenvalues, key=abs)
            zero_ok &= abs(ev[0]) < 1e-7 and abs(ev[1]) < 1e-7
            worst = max(worst, abs(ev[2] - sign * g))
    return worst < 1e-5 and zero_ok, f"max eigenvalue error={worst:.1e}"


def check_5():
    orb = equilibria.verify_heteroclinic(0.0, math.pi / 2, P, n=100)
    return orb.max_error < 1e-8 and orb.psi_drift == 0.0, f"err={orb.max_error:.1e} psi drift={orb.psi_drift}"


def check_6():
    tr = integrate(dyn.plane_field(P), [0.7, -0.4, 0.3, 0.5], (0, 10), TIGHT)
    drift = float(np.max(monitor_energy(tr, P)))
    ts = integrate(dyn.sphere_field(P), [0.4, 2.0, 0.3, -0.2], (0, 10), TIGHT)
    am = monitor_angular_momentum(ts, P)
    ok = drift < 1e-9 and am.max_drift < 1e-12 and am.max_mismatch < 1e-10
    return ok, f"K drift={drift:.1e} p_phi drift={am.max_drift:.1e} |l-p_phi|={am.max_mismatch:.1e}"


def check_7():
    c = diagnostics.pushforward_check(P, n=100)
    return c.ok, f"max relative error={c.value:.1e}"


def check_8():
    _, h2 = energy.thresholds(P)
    r, a = energy.zvm_restpoint(h2, P)
    gap = abs(geometry.phi1(r) - 4 * P.R)
    absent = [energy.certify_zvm_restpoints(h2 + d, P) for d in (-0.1, 0.1)]
    ok_abs = all(c.point is None and c.min_grad_log_b > 1e-3 for c in absent)
    ok = gap < 1e-12 and abs(a - 1.5 * math.pi) < 1e-15 and ok_abs
    return ok, f"r*={r:.10f} |phi1(r*)-4R|={gap:.1e} min|grad b/b| (h2-0.1)={absent[0].min_grad_log_b:.3g}"


def check_9():
    tb = 2 * math.pi / 3
    orb = go.vortex_parallel(tb, P)
    period_err = abs(orb.period - 2 * math.pi * P.R**2 * math.sin(tb) ** 2 / abs(orb.p_phi))
    try:
        go.vortex_parallel(math.pi / 3, P)
        raised = False
    except NoOrbit:
        raised = True
    ok = orb.residual < 1e-10 and orb.closing_error < 1e-6 and period_err < 1e-8 and raised
    return ok, f"p_phi={orb.p_phi:.12g} closing={orb.closing_error:.1e} period={orb.period:.10g}"


def check_10():
    _, h2 = energy.thresholds(P)
    lo = go.demo_orbit(h2 - 0.01, P).event_kinds()
    hi = go.demo_orbit(h2 + 0.01, P).event_kinds()
    mid = go.demo_orbit(h2, P, t_end=1000.0)
    th = float(mid.final[0])
    p = go.h2_shell_momentum(th, P)
    ok = (lo == [EventKind.ZERO_VELOCITY_TOUCH, EventKind.COLLISION_APPROACH]
          and hi == [EventKind.ANTIPODAL_PASSAGE, EventKind.COLLISION_APPROACH]
          and abs(mid.t[-1] - 1000.0) < 1e-9 and 0.0 <= th < 0.05 and abs(p) < 0.05
          and EventKind.ANTIPODAL_PASSAGE not in mid.event_kinds())
    names = lambda ks: "/".join(k.value for k in ks)
    return ok, f"h2-0.01: {names(lo)}; h2+0.01: {names(hi)}; h2: theta(1000)={th:.1e}"


def check_11():
    pre = go.meridian_orbit(0.0, 2.0, 0.2, P, t_end=100.0).traj
    path = go.transmit(pre, P)
    res = path.eom_residual(100)
    gap = path.continuity_gap()
    return res < 1e-6 and gap < 1e-6, f"EOM residual={res:.1e} continuity gap={gap:.1e}"


def check_12():
    rows = diagnostics.limit_table(P)
    bad = [r.name for r in rows if not r.ok]
    return not bad, f"{len(rows)} limits, monotone and converged" if not bad else f"failing: {bad}"


TITLES = {
    1: "thresholds h1, h2",
    2: "regime grid oracle",
    3: "collision-manifold energy constant",
    4: "rest point eigenvalues",
    5: "heteroclinic closed form",
    6: "conservation",
    7: "pushforward consistency",
    8: "zero velocity rest point",
    9: "vortex parallel",
    10: "three-regime demonstrations",
    11: "transmission validity",
    12: "collision limit table",
}
CHECKS = {n: globals()[f"check_{n}"] for n in TITLES}


def _line(n, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d} {TITLES[n]}: {detail}"


@pytest.mark.parametrize("n", list(TITLES))
def test_criterion(n):
    try:
        ok, detail = CHECKS[n]()
    except Exception as exc:  # a crash counts as a failure line
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    RESULTS[n] = _line(n, ok, detail)
    print(RESULTS[n])
    assert ok, detail


if __name__ == "__main__":
    for n, fn in CHECKS.items():
        print(_line(n, *fn()))
