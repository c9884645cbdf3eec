"""Rest points of the angular-variable flow and the collision-manifold dynamics.

On the collision manifold r = 0 the flow reduces to
``dalpha/dsigma = (Gamma/4pi) sin(psi - alpha)``, ``dpsi/dsigma = 0``.  Its
rest points form two circles, P1 = {psi = alpha} and P2 = {psi = alpha + pi};
orbits in between are segments parallel to the alpha axis running from P2
to P1.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .charts import Chart
from .dynamics import collision_field, vf_angular_sigma
from .errors import DegenerateStart
from .geometry import Params, TWO_PI
from .integrator import IntegratorOptions, integrate

ZERO_EIG = 1e-7
R_STEPS = (1e-4, 1e-5)
ANGLE_STEP = 1e-5


class Family(enum.Enum):
    P1 = "P1"
    P2 = "P2"
    ZVM_POINT = "ZvmPoint"


class Classification(enum.Enum):
    DEGENERATE_SADDLE = "DegenerateSaddle"
    ATTRACTOR = "Attractor"
    REPELLER = "Repeller"
    OTHER = "Other"


@dataclass
class RestPoint:
    chart: Chart
    location: tuple[float, float, float]
    family: Family
    eigenvalues: list[complex]
    classification: Classification
    within_collision: Classification
    residual: float
    eigenvector: np.ndarray | None = None

    @property
    def alpha(self) -> float:
        return self.location[1]

    def manifold_dimensions(self) -> dict[str, int]:
        """Raw counts from the eigenvalue signs (no center-manifold reduction)."""
        ev = np.real(np.asarray(self.eigenvalues))
        return {"unstable": int(np.sum(ev > 0)), "stable": int(np.sum(ev < 0)),
                "center": int(np.sum(ev == 0))}


@dataclass
class HeteroclinicOrbit:
    psi: float
    sigma: np.ndarray
    alpha: np.ndarray
    source: tuple[float, float, float]
    sink: tuple[float, float, float]
    max_error: float
    psi_drift: float
    sigma_backward: np.ndarray | None = None
    alpha_backward: np.ndarray | None = None

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.sigma.tolist(), self.alpha.tolist()))


def _field(y, params: Params, h: float) -> np.ndarray:
    return vf_angular_sigma(y, h, params)


def numeric_jacobian(location, params: Params, h: float = 0.0, r_step: float = R_STEPS[0]) -> np.ndarray:
    """Central differences in alpha and psi, forward differences in r (r < 0 is off the domain)."""
    y0 = np.asarray(location, dtype=float)
    F0 = _field(y0, params, h)
    J = np.empty((3, 3))
    e = np.array([r_step, 0.0, 0.0])
    J[:, 0] = (_field(y0 + e, params, h) - F0) / r_step
    for j in (1, 2):
        e = np.zeros(3)
        e[j] = ANGLE_STEP
        J[:, j] = (_field(y0 + e, params, h) - _field(y0 - e, params, h)) / (2.0 * ANGLE_STEP)
    return J


@dataclass
class JacobianReport:
    jacobian: np.ndarray
    eigenvalues: list[complex]
    eigenvector: np.ndarray
    richardson_gap: float


def jacobian_eigs(p, params: Params, h: float = 0.0) -> JacobianReport:
    """Eigenvalues of the numeric Jacobian at a rest point, sorted by real part.

    The r column is taken at both r-steps; their gap (and the Richardson
    extrapolation used for the final matrix) measures the one-sided error.
    Magnitudes below ``ZERO_EIG`` are reported as exact zeros.
    """
    loc = p.location if isinstance(p, RestPoint) else tuple(p)
    J1 = numeric_jacobian(loc, params, h, R_STEPS[0])
    J2 = numeric_jacobian(loc, params, h, R_STEPS[1])
    q = R_STEPS[0] / R_STEPS[1]
    J = (q * J2 - J1) / (q - 1.0)
    gap = float(np.max(np.abs(J1 - J2)))
    w, V = np.linalg.eig(J)
    w = np.where(np.abs(w) < ZERO_EIG, 0.0, w)
    order = np.argsort(np.real(w), kind="stable")
    w = w[order]
    V = V[:, order]
    nz = np.flatnonzero(w != 0.0)
    vec = np.real(V[:, nz[0]]) if nz.size else np.zeros(3)
    eig = [complex(v) for v in w]
    return JacobianReport(J, eig, vec, gap)


def _make(alpha: float, psi: float, family: Family, params: Params, h: float) -> RestPoint:
    loc = (0.0, alpha, psi)
    res = float(np.max(np.abs(_field(np.array(loc), params, h))))
    rep = jacobian_eigs(loc, params, h)
    nz = [v.real for v in rep.eigenvalues if v != 0]
    inner = Classification.OTHER
    if nz:
        inner = Classification.ATTRACTOR if nz[0] < 0 else Classification.REPELLER
    return RestPoint(Chart.SIGMA, loc, family, rep.eigenvalues, Classification.DEGENERATE_SADDLE,
                     inner, res, rep.eigenvector)


def restpoint_curves(params: Params, n: int, h: float = 0.0) -> list[RestPoint]:
    """n equally spaced samples on each of P1 and P2 (P1 points first)."""
    if n < 1:
        raise ValueError("need at least one sample")
    alphas = [TWO_PI * k / n for k in range(n)]
    out = [_make(a, a, Family.P1, params, h) for a in alphas]
    out += [_make(a, a + math.pi, Family.P2, params, h) for a in alphas]
    return out


def restpoint_at(alpha: float, family: Family, params: Params, h: float = 0.0) -> RestPoint:
    psi = alpha if family is Family.P1 else alpha + math.pi
    return _make(alpha, psi, family, params, h)


def scan_collision_grid(params: Params, n: int = 200, band: float = 1e-8) -> float:
    """Smallest collision-flow speed on an (alpha, psi) grid off the two rest-point bands."""
    g = np.linspace(0.0, TWO_PI, n, endpoint=False)
    A, P = np.meshgrid(g, g, indexing="ij")
    s = np.sin(P - A)
    speed = params.Gamma / (4.0 * math.pi) * np.abs(s)
    mask = np.abs(s) >= band
    return float(np.min(speed[mask])) if mask.any() else math.inf


def heteroclinic_closed_form(u0: float, sigma, params: Params) -> np.ndarray:
    """u(sigma) = alpha - psi solving du/dsigma = -(Gamma/4pi) sin u."""
    return 2.0 * np.arctan(math.tan(u0 / 2.0) * np.exp(-params.Gamma * np.asarray(sigma) / (4.0 * math.pi)))


def verify_heteroclinic(psi: float, u0: float, params: Params, sigma_end: float = 200.0,
                        n: int = 100, rel_tol: float = 1e-10, abs_tol: float = 1e-12) -> HeteroclinicOrbit:
    """Integrate the collision flow from alpha = psi + u0 and compare with the closed form."""
    u = math.remainder(u0, TWO_PI)  # (-pi, pi]
    if abs(math.sin(u)) < 1e-14:
        raise DegenerateStart(f"u0={u0!r} is a rest point")
    vf = collision_field(params)
    opts = IntegratorOptions(rel_tol=rel_tol, abs_tol=abs_tol)
    sig = np.linspace(0.0, sigma_end, n)
    fw = integrate(vf, [psi + u, psi], (0.0, sigma_end), opts, t_eval=sig)
    err = np.max(np.abs(fw.y[:, 0] - psi - heteroclinic_closed_form(u, sig, params)))
    bw = integrate(vf, [psi + u, psi], (0.0, -sigma_end), opts, t_eval=-sig)
    err_b = np.max(np.abs(bw.y[:, 0] - psi - heteroclinic_closed_form(u, -sig, params)))
    drift = float(max(np.max(np.abs(fw.y[:, 1] - psi)), np.max(np.abs(bw.y[:, 1] - psi))))
    src_alpha = psi + math.copysign(math.pi, u)
    return HeteroclinicOrbit(psi, fw.t, fw.y[:, 0], (0.0, src_alpha, psi), (0.0, psi, psi),
                             float(max(err, err_b)), drift, bw.t, bw.y[:, 0])


@dataclass
class TransverseReport:
    family: Family
    alpha: float
    r: float
    dr_dsigma: float

    @property
    def sign(self) -> int:
        return int(np.sign(self.dr_dsigma))


def stability_transverse(family: Family, params: Params, alpha: float = 0.5, r: float = 1e-3,
                         h: float = 0.0) -> TransverseReport:
    """dr/dsigma just off the collision manifold above a rest point."""
    psi = alpha if family is Family.P1 else alpha + math.pi
    dr = float(_field(np.array([r, alpha, psi]), params, h)[0])
    return TransverseReport(family, alpha, r, dr)
