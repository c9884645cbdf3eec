"""Numerical consistency checks of the vector fields.

* pushforward: the plane field carried into McGehee variables by the chart
  Jacobian, rescaled by dt/dtau, must equal the McGehee tau-field;
* symplectic gradients: every canonical field equals (dH/dp, -dH/dq)
  computed by finite differences of its Hamiltonian;
* B identity: the chain-rule dpsi/dtau and the term-by-term formula agree;
* limit table: coefficient and field limits as r -> 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dynamics as dyn
from . import geometry as geo
from .charts import Chart, ChartState, SIGMA_RATE, dtau_dt, mcgehee_to_plane, plane_to_mcgehee_jacobian, psi_to_z
from .energy import e_hat, e_hat_limit
from .geometry import Params


@dataclass
class CheckResult:
    name: str
    value: float
    tol: float

    @property
    def ok(self) -> bool:
        return bool(self.value < self.tol)


def random_tau_states(n: int, params: Params, r_range=(0.3, 3.0), seed: int = 7) -> np.ndarray:
    rng = np.random.default_rng(seed)
    r = rng.uniform(*r_range, n)
    alpha = rng.uniform(0.0, 2.0 * math.pi, n)
    z = rng.normal(size=(n, 2))
    return np.column_stack([r, alpha, z])


def pushforward_error(y_tau, params: Params) -> float:
    """Relative mismatch between J vf_plane dt/dtau and vf_mcgehee_tau at one state."""
    s_tau = ChartState(Chart.TAU, tuple(y_tau))
    s_pl = mcgehee_to_plane(s_tau, params)
    J = plane_to_mcgehee_jacobian(s_pl, params)
    pushed = J @ dyn.vf_plane(s_pl.as_array(), params) / dtau_dt(y_tau[0])
    direct = dyn.vf_mcgehee_tau(y_tau, params)
    return float(np.linalg.norm(pushed - direct) / max(np.linalg.norm(direct), 1e-300))


def pushforward_check(params: Params, n: int = 100, seed: int = 7) -> CheckResult:
    errs = [pushforward_error(y, params) for y in random_tau_states(n, params, seed=seed)]
    return CheckResult("pushforward plane -> mcgehee-tau (relative)", max(errs), 1e-8)


def _sym_err(vf, H, y) -> float:
    a = vf(y)
    b = dyn.symplectic_gradient_fd(H, y)
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(a)))))


def symplectic_checks(params: Params) -> list[CheckResult]:
    p = params
    cases = [
        ("plane", lambda y: dyn.vf_plane(y, p), lambda y: dyn.k_mech(y, p), [0.7, -0.4, 0.3, 0.5]),
        ("sphere-north", lambda y: dyn.vf_sphere_vortex(y, p, dyn.VortexAt.NORTH_POLE),
         lambda y: dyn.h_sphere(y, p, dyn.VortexAt.NORTH_POLE), [0.4, 2.0, 0.3, -0.2]),
        ("sphere-equator", lambda y: dyn.vf_sphere_vortex(y, p, dyn.VortexAt.EQUATOR),
         lambda y: dyn.h_sphere(y, p, dyn.VortexAt.EQUATOR), [0.4, 1.1, 0.3, -0.2]),
        ("sphere-geodesic", lambda y: dyn.vf_sphere_geodesic(y, p),
         lambda y: dyn.h_sphere_geodesic(y, p), [0.4, 1.1, 0.3, -0.2]),
        ("meridian", lambda y: dyn.vf_meridian(y, p), lambda y: dyn.h_meridian(y, p), [1.2, 0.4]),
    ]
    return [CheckResult(f"symplectic gradient {name}", _sym_err(vf, H, np.array(y)), 1e-7)
            for name, vf, H, y in cases]


def b_identity_check(params: Params) -> CheckResult:
    worst = 0.0
    for h, r, alpha, psi in [(0.5, 0.7, 1.0, 2.0), (0.1, 1.3, 4.0, 0.3), (-0.2, 0.4, 2.5, 5.0)]:
        if e_hat(h, r, alpha, params) <= 0.0:
            continue
        chain = dyn.ab_triple((r, alpha, psi), h, params).B
        shown = dyn.b_displayed(h, r, alpha, psi, params)
        worst = max(worst, abs(chain - shown) / max(1.0, abs(chain)))
    return CheckResult("B chain rule vs term-by-term", worst, 1e-10)


@dataclass
class LimitRow:
    name: str
    r_values: tuple
    values: tuple
    limit: float

    @property
    def errors(self) -> tuple:
        return tuple(abs(v - self.limit) for v in self.values)

    @property
    def monotone(self) -> bool:
        e = self.errors
        return all(e[i + 1] <= e[i] * (1.0 + 1e-12) + 1e-300 for i in range(len(e) - 1))

    @property
    def converged(self) -> bool:
        return self.errors[-1] < 1e-6

    @property
    def ok(self) -> bool:
        return self.monotone and self.converged


def limit_table(params: Params, rs=(1e-2, 1e-3, 1e-4), alpha: float = 0.7, psi: float = 1.9,
                h: float = 0.0) -> list[LimitRow]:
    """r -> 0 limits of the McGehee coefficients and fields on the shell h."""
    R = params.R
    L0 = e_hat_limit(params)
    rows: dict[str, list] = {k: [] for k in (
        "a", "b", "l", "A1", "A2", "B", "r^3 e^(-1/r^2) b_x/b", "r^3 e^(-1/r^2) b_y/b",
        "z_x", "z_y", "E_hat", "dr/dsigma", "dalpha/dsigma", "dpsi/dsigma")}
    for r in rs:
        cb = geo.coeffs_mcgehee(r, alpha, params)
        rows["a"].append(cb.a)
        rows["b"].append(cb.b)
        rows["l"].append(cb.l)
        trip = dyn.ab_triple((r, alpha, psi), h, params)
        rows["A1"].append(trip.A1)
        rows["A2"].append(trip.A2)
        rows["B"].append(trip.B)
        gx, gy = geo.scaled_log_b_grad(r, alpha, params)
        rows["r^3 e^(-1/r^2) b_x/b"].append(gx)
        rows["r^3 e^(-1/r^2) b_y/b"].append(gy)
        z = psi_to_z(ChartState(Chart.SIGMA, (r, alpha, psi), h=h), params).coords
        rows["z_x"].append(z[2])
        rows["z_y"].append(z[3])
        rows["E_hat"].append(e_hat(h, r, alpha, params))
        f = dyn.vf_angular_sigma((r, alpha, psi), h, params)
        rows["dr/dsigma"].append(f[0])
        rows["dalpha/dsigma"].append(f[1])
        rows["dpsi/dsigma"].append(f[2])
    limits = {
        "a": 1.0, "b": 0.0, "l": 1.0 / (8.0 * R * R), "A1": 0.0, "A2": 0.0, "B": 0.0,
        "r^3 e^(-1/r^2) b_x/b": 0.0, "r^3 e^(-1/r^2) b_y/b": 0.0,
        "z_x": math.sqrt(L0) * math.cos(psi), "z_y": math.sqrt(L0) * math.sin(psi), "E_hat": L0,
        "dr/dsigma": 0.0,
        "dalpha/dsigma": params.Gamma / (4.0 * math.pi) * math.sin(psi - alpha) * (2.0 * SIGMA_RATE),
        "dpsi/dsigma": 0.0,
    }
    return [LimitRow(k, tuple(rs), tuple(v), limits[k]) for k, v in rows.items()]


def field_check(params: Params) -> list[CheckResult]:
    out = [pushforward_check(params), *symplectic_checks(params), b_identity_check(params)]
    for row in limit_table(params):
        out.append(CheckResult(f"limit r->0 {row.name}", row.errors[-1] if row.monotone else math.inf, 1e-6))
    return out


def cross_chart_report(params: Params, y_sphere=(0.4, 1.1, 0.3, -0.2)) -> dict:
    """Compare the equator-vortex sphere flow with the plane flow under the momentum lift.

    The plane Hamiltonian carries the anisotropic factor a on p_x only, so it is
    not the cotangent pushforward of the round-sphere Hamiltonian; the mismatch
    is reported, never asserted.
    """
    from .charts import cotangent_lift_plane_sphere, cotangent_lift_sphere_plane

    s = ChartState(Chart.SPHERE, tuple(y_sphere))
    pl = cotangent_lift_sphere_plane(s, params)
    back = cotangent_lift_plane_sphere(pl, params)
    h_s = dyn.h_sphere(np.asarray(y_sphere), params, dyn.VortexAt.EQUATOR)
    k_p = dyn.k_mech(pl.as_array(), params)
    return {
        "lift_roundtrip": float(np.max(np.abs(back.as_array() - np.asarray(y_sphere)))),
        "h_sphere_equator": float(h_s),
        "k_mech_lifted": float(k_p),
        "hamiltonian_gap": float(abs(h_s - k_p)),
    }
