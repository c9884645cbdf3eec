"""Chart states and the transformations between them.

Four charts are used:

* ``SPHERE``  -- (phi, theta, p_phi, p_theta) on the sphere;
* ``PLANE``   -- (x, y, p_x, p_y) on the stereographic plane;
* ``TAU``     -- McGehee variables (r, alpha, z_x, z_y), time tau;
* ``SIGMA``   -- (r, alpha, psi) on a fixed energy shell h, time sigma.

McGehee blow-up: ``x = phi1(r) cos(alpha)``, ``y = phi1(r) sin(alpha) + 2R``,
``p = z / r``.  On the shell ``a z_x**2 + z_y**2 = E_hat`` the momenta are
``z_x = sqrt(E_hat / a) cos(psi)``, ``z_y = sqrt(E_hat) sin(psi)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .energy import e_hat
from .errors import (
    AtVortex,
    CollisionState,
    DomainError,
    ForbiddenRegion,
    OffShell,
    PoleSingular,
    ZeroVelocity,
)
from .geometry import Params, wrap_angle


class Chart(enum.Enum):
    SPHERE = "sphere-angles"
    PLANE = "plane"
    TAU = "mcgehee-tau"
    SIGMA = "angular-sigma"


class TimeScale(enum.Enum):
    PHYSICAL = "t"
    TAU = "tau"
    SIGMA = "sigma"


COMPONENTS = {
    Chart.SPHERE: ("phi", "theta", "p_phi", "p_theta"),
    Chart.PLANE: ("x", "y", "p_x", "p_y"),
    Chart.TAU: ("r", "alpha", "z_x", "z_y"),
    Chart.SIGMA: ("r", "alpha", "psi"),
}


@dataclass(frozen=True)
class ChartState:
    chart: Chart
    coords: tuple
    h: float | None = None

    def __post_init__(self):
        n = len(COMPONENTS[self.chart])
        if len(self.coords) != n:
            raise DomainError(f"{self.chart.value} state needs {n} coordinates")
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))
        if self.chart is Chart.SIGMA and self.h is None:
            raise DomainError("angular-sigma states carry an energy h")
        if self.chart in (Chart.TAU, Chart.SIGMA) and self.coords[0] < 0.0:
            raise DomainError("McGehee radius must be >= 0")

    def as_array(self) -> np.ndarray:
        return np.array(self.coords)


# --- time rescalings ---------------------------------------------------------

# d tau = SIGMA_RATE * sqrt(E_hat) d sigma.  With 1/2 the collision-manifold
# flow is d alpha/d sigma = (Gamma/4pi) sin(psi - alpha).
SIGMA_RATE = 0.5


def dtau_dt(r: float) -> float:
    """phi2(r)/phi1(r) = exp(1/r^2)/r^2; infinite at r = 0."""
    if r <= 0.0:
        return math.inf
    # exp overflows for r < ~0.0375; the factor is then effectively infinite
    e = 1.0 / (r * r)
    if e > 700.0:
        return math.inf
    return math.exp(e) / (r * r)


def dsigma_dtau(h: float, r: float, alpha: float, params: Params) -> float:
    E = e_hat(h, r, alpha, params)
    if E <= 0.0:
        raise ZeroVelocity("sigma time is undefined where E_hat <= 0")
    return 1.0 / (SIGMA_RATE * math.sqrt(E))


# --- phi1 inverse ------------------------------------------------------------

def phi1_inverse(v: float, params: Params | None = None) -> float:
    """Unique r >= 0 with r exp(-1/r^2) = v.

    Bisection on [0, v + 1] (phi1(v + 1) >= v) down to a 1e-14 bracket,
    then two Newton steps using the analytic derivative.
    """
    if v < 0.0:
        raise DomainError("phi1_inverse needs v >= 0")
    if v == 0.0:
        return 0.0
    lo, hi = 0.0, v + 1.0
    while hi - lo > 1e-14 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if geo.phi1(mid) < v:
            lo = mid
        else:
            hi = mid
    r = 0.5 * (lo + hi)
    for _ in range(2):
        d = geo.phi1_prime(r)
        if d <= 0.0:
            break
        step = (geo.phi1(r) - v) / d
        if not math.isfinite(step):
            break
        r -= step
    return r


# --- plane <-> McGehee ---------------------------------------------------------

def plane_to_mcgehee(s: ChartState, params: Params) -> ChartState:
    _expect(s, Chart.PLANE)
    x, y, px, py = s.coords
    dy = y - 2.0 * params.R
    rho = math.hypot(x, dy)
    if rho == 0.0:
        raise AtVortex("the vortex image has no McGehee preimage with r > 0")
    r = phi1_inverse(rho)
    alpha = wrap_angle(math.atan2(dy, x))
    return ChartState(Chart.TAU, (r, alpha, px * r, py * r))


def mcgehee_to_plane(s: ChartState, params: Params) -> ChartState:
    _expect(s, Chart.TAU)
    r, alpha, zx, zy = s.coords
    if r == 0.0:
        raise CollisionState("r = 0 maps to the vortex; momenta are undefined")
    f = geo.phi1(r)
    return ChartState(
        Chart.PLANE, (f * math.cos(alpha), f * math.sin(alpha) + 2.0 * params.R, zx / r, zy / r)
    )


def plane_to_mcgehee_jacobian(s: ChartState, params: Params) -> np.ndarray:
    """d(r, alpha, z_x, z_y) / d(x, y, p_x, p_y), analytic."""
    _expect(s, Chart.PLANE)
    x, y, px, py = s.coords
    dy = y - 2.0 * params.R
    rho2 = x * x + dy * dy
    rho = math.sqrt(rho2)
    r = phi1_inverse(rho)
    dr_drho = 1.0 / geo.phi1_prime(r)
    dr_dx = dr_drho * x / rho
    dr_dy = dr_drho * dy / rho
    J = np.zeros((4, 4))
    J[0, 0], J[0, 1] = dr_dx, dr_dy
    J[1, 0], J[1, 1] = -dy / rho2, x / rho2
    J[2, 0], J[2, 1], J[2, 2] = px * dr_dx, px * dr_dy, r
    J[3, 0], J[3, 1], J[3, 3] = py * dr_dx, py * dr_dy, r
    return J


# --- z <-> psi -------------------------------------------------------------------

def z_to_psi(s: ChartState, h: float, params: Params, rtol: float = 1e-8) -> ChartState:
    _expect(s, Chart.TAU)
    r, alpha, zx, zy = s.coords
    E = e_hat(h, r, alpha, params)
    if E <= 1e-14:
        raise ZeroVelocity(f"E_hat={E!r} at r={r!r}: psi undefined")
    a = geo.coeffs_mcgehee(r, alpha, params).a
    lhs = a * zx * zx + zy * zy
    if abs(lhs - E) > rtol * abs(E):
        raise OffShell(f"a z_x^2 + z_y^2 = {lhs!r} but E_hat = {E!r}")
    psi = wrap_angle(math.atan2(zy, math.sqrt(a) * zx))
    return ChartState(Chart.SIGMA, (r, alpha, psi), h=h)


def psi_to_z(s: ChartState, params: Params) -> ChartState:
    _expect(s, Chart.SIGMA)
    r, alpha, psi = s.coords
    E = e_hat(s.h, r, alpha, params)
    if E < 0.0:
        raise ForbiddenRegion(f"E_hat={E!r} < 0 at r={r!r}, alpha={alpha!r}")
    a = geo.coeffs_mcgehee(r, alpha, params).a
    sq = math.sqrt(E)
    return ChartState(Chart.TAU, (r, alpha, sq / math.sqrt(a) * math.cos(psi), sq * math.sin(psi)))


# --- sphere <-> plane --------------------------------------------------------------

def _angles_jacobian(x: float, y: float, R: float) -> np.ndarray:
    """d(phi, theta)/d(x, y) from phi = atan2(y, x), theta = 2 atan(rho / 2R)."""
    rho2 = x * x + y * y
    rho = math.sqrt(rho2)
    dtheta_drho = (4.0 * R) / (4.0 * R * R + rho2)
    return np.array(
        [[-y / rho2, x / rho2], [dtheta_drho * x / rho, dtheta_drho * y / rho]]
    )


def cotangent_lift_sphere_plane(s: ChartState, params: Params) -> ChartState:
    """Positions by stereographic projection, momenta by p_plane = J^T p_sphere."""
    _expect(s, Chart.SPHERE)
    phi, theta, pphi, ptheta = s.coords
    if theta <= 0.0 or theta >= math.pi:
        raise PoleSingular("momentum lift needs 0 < theta < pi")
    R = params.R
    rho = 2.0 * R * math.tan(0.5 * theta)
    x, y = rho * math.cos(phi), rho * math.sin(phi)
    J = _angles_jacobian(x, y, R)
    px, py = J.T @ np.array([pphi, ptheta])
    return ChartState(Chart.PLANE, (x, y, px, py))


def cotangent_lift_plane_sphere(s: ChartState, params: Params) -> ChartState:
    _expect(s, Chart.PLANE)
    x, y, px, py = s.coords
    if x == 0.0 and y == 0.0:
        raise PoleSingular("the plane origin is the south pole")
    sp = geo.stereo_inverse(geo.PlanePoint(x, y), params)
    J = _angles_jacobian(x, y, params.R)
    pphi, ptheta = np.linalg.solve(J.T, np.array([px, py]))
    return ChartState(Chart.SPHERE, (sp.phi, sp.theta, pphi, ptheta))


def _expect(s: ChartState, chart: Chart) -> None:
    if s.chart is not chart:
        raise DomainError(f"expected a {chart.value} state, got {s.chart.value}")
