"""Vector fields for every chart.

All Hamiltonian fields are the canonical equations ``q' = dH/dp``,
``p' = -dH/dq`` of

* ``H_sphere = (p_phi^2 / sin^2 theta + p_theta^2) / (2R^2) + (Gamma/8pi) log chord^2``
* ``K_mech   = l (a p_x^2 + p_y^2) + (Gamma/8pi) log b``

The McGehee tau-field is the pushforward of the plane field under the blow-up
followed by ``d tau = (phi2/phi1) dt``; the sigma-field restricts it to a shell
and rescales by ``d tau = SIGMA_RATE sqrt(E_hat) d sigma``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import geometry as geo
from .charts import SIGMA_RATE, Chart, TimeScale
from .energy import e_hat, e_hat_partials
from .errors import AtVortex, ForbiddenRegion, OffShell, PoleSingular
from .geometry import Params, PlanePoint


class VortexAt(enum.Enum):
    EQUATOR = "equator"  # vortex at (phi, theta) = (pi/2, pi/2)
    NORTH_POLE = "north"  # vortex at theta = pi


# --- Hamiltonians ------------------------------------------------------------------

def h_sphere_geodesic(y, params: Params) -> float:
    _, theta, pphi, ptheta = y
    st = math.sin(theta)
    return (pphi * pphi / (st * st) + ptheta * ptheta) / (2.0 * params.R**2)


def h_sphere(y, params: Params, vortex_at: VortexAt = VortexAt.NORTH_POLE) -> float:
    phi, theta = y[0], y[1]
    if vortex_at is VortexAt.NORTH_POLE:
        chord2 = 2.0 * params.R**2 * (1.0 + math.cos(theta))
    else:
        chord2 = 2.0 * params.R**2 * (1.0 - math.sin(theta) * math.sin(phi))
    kin = h_sphere_geodesic(y, params) if y[2] != 0.0 else y[3] ** 2 / (2.0 * params.R**2)
    return kin + params.k * math.log(chord2)


def k_mech(y, params: Params) -> float:
    x, yy, px, py = y
    cb = geo.coeffs_xy(PlanePoint(x, yy), params)
    if cb.b == 0.0:
        raise AtVortex("K_mech is singular at the vortex image")
    return cb.l * (cb.a * px * px + py * py) + params.k * math.log(cb.b)


def k_mech_mcgehee(y, params: Params) -> float:
    """K_mech written in (r, alpha, z); needs r > 0."""
    r, alpha, zx, zy = y
    cb = geo.coeffs_mcgehee(r, alpha, params)
    log_b = math.log(2.0 * params.R**2 * r * r / cb.c) - 2.0 / (r * r)
    return cb.l * (cb.a * zx * zx + zy * zy) / (r * r) + params.k * log_b


def h_meridian(y, params: Params) -> float:
    theta, ptheta = y
    return ptheta * ptheta / (2.0 * params.R**2) + params.k * math.log(
        2.0 * params.R**2 * (1.0 + math.cos(theta))
    )


# --- sphere fields -------------------------------------------------------------------

def _check_theta(theta: float) -> float:
    st = math.sin(theta)
    if st == 0.0 or not 0.0 < theta < math.pi:
        raise PoleSingular(f"angular chart singular at theta={theta!r}")
    return st


def vf_sphere_geodesic(y, params: Params) -> np.ndarray:
    _, theta, pphi, ptheta = y
    st = _check_theta(theta)
    R2 = params.R**2
    centrifugal = 0.0 if pphi == 0.0 else math.cos(theta) / (R2 * st**3) * pphi * pphi
    return np.array([pphi / (R2 * st * st), ptheta / R2, 0.0, centrifugal])


def vf_sphere_vortex(y, params: Params, vortex_at: VortexAt = VortexAt.NORTH_POLE) -> np.ndarray:
    phi, theta, pphi, ptheta = y
    st = _check_theta(theta)
    ct = math.cos(theta)
    R2 = params.R**2
    k = params.k
    centrifugal = 0.0 if pphi == 0.0 else ct / (R2 * st**3) * pphi * pphi
    if vortex_at is VortexAt.NORTH_POLE:
        # -d/dtheta k log(2R^2 (1 + cos theta)) = k sin/(1 + cos) = k tan(theta/2)
        return np.array([pphi / (R2 * st * st), ptheta / R2, 0.0, centrifugal + k * math.tan(0.5 * theta)])
    sp, cp = math.sin(phi), math.cos(phi)
    q = 1.0 - st * sp
    if q <= 0.0:
        raise AtVortex("state is at the vortex (pi/2, pi/2)")
    return np.array([
        pphi / (R2 * st * st),
        ptheta / R2,
        k * st * cp / q,
        centrifugal + k * ct * sp / q,
    ])


def vf_meridian(y, params: Params) -> np.ndarray:
    """Reduced vortex-meridian flow (p_phi = 0) in a signed arc angle theta.

    Negative theta is the opposite meridian; the field is regular at theta = 0.
    """
    theta, ptheta = y
    c = math.cos(0.5 * theta)
    if c == 0.0:
        raise AtVortex("meridian state is at the vortex")
    return np.array([ptheta / params.R**2, params.k * math.sin(0.5 * theta) / c])


# --- plane field ----------------------------------------------------------------------

def vf_plane(y, params: Params) -> np.ndarray:
    x, yy, px, py = y
    p = PlanePoint(x, yy)
    if x == 0.0 and yy == 2.0 * params.R:
        raise AtVortex("plane field is singular at (0, 2R)")
    cb = geo.coeffs_xy(p, params)
    g = geo.coeff_grads_xy(p, params)
    lbx, lby = geo.log_b_grad_xy(p, params)
    k = params.k
    return np.array([
        2.0 * cb.al * px,
        2.0 * cb.l * py,
        -(g.al_x * px * px + g.l_x * py * py + k * lbx),
        -(g.al_y * px * px + g.l_y * py * py + k * lby),
    ])


# --- McGehee tau field ----------------------------------------------------------------

def a_pairing(r: float, alpha: float, zx: float, zy: float, params: Params) -> float:
    """<z, s(alpha)>_a = a z_x cos(alpha) + z_y sin(alpha)."""
    a = geo.coeffs_mcgehee(r, alpha, params).a
    return a * zx * math.cos(alpha) + zy * math.sin(alpha)


def vf_mcgehee_tau(y, params: Params) -> np.ndarray:
    """Regularized field; every term is written so r = 0 needs no special case."""
    r, alpha, zx, zy = y
    R = params.R
    cb = geo.coeffs_mcgehee(r, alpha, params)
    f = geo.phi1(r)
    s, co = math.sin(alpha), math.cos(alpha)
    x = f * co
    yy = f * s + 2.0 * R
    rho2 = cb.c - 4.0 * R * R
    rho4 = rho2 * rho2
    c3 = cb.c**3
    al_x, al_y = -x / rho4, -yy / rho4
    l_x, l_y = -32.0 * R * R * x / c3, -32.0 * R * R * yy / c3
    gx, gy = geo.scaled_log_b_grad(r, alpha, params)
    k = params.k
    r2 = r * r
    pair = cb.a * zx * co + zy * s
    w = 2.0 * r2 / (r2 + 2.0) * cb.l * pair
    return np.array([
        r * w,
        2.0 * cb.l * (zy * co - cb.a * zx * s),
        -f * (al_x * zx * zx + l_x * zy * zy) - k * gx + w * zx,
        -f * (al_y * zx * zx + l_y * zy * zy) - k * gy + w * zy,
    ])


def vf_zero_velocity(r: float, alpha: float, params: Params) -> np.ndarray:
    """tau-field at z = 0: only the potential terms survive."""
    gx, gy = geo.scaled_log_b_grad(r, alpha, params)
    return np.array([0.0, 0.0, -params.k * gx, -params.k * gy])


# --- sigma field -------------------------------------------------------------------------

@dataclass(frozen=True)
class ABTriple:
    """A1 = dz_x/dtau, A2 = dz_y/dtau and B = sqrt(E_hat) dpsi/dtau."""

    A1: float
    A2: float
    B: float


def f1(r: float, alpha: float, psi: float, params: Params) -> float:
    sa = math.sqrt(geo.coeffs_mcgehee(r, alpha, params).a)
    return sa * math.cos(psi) * math.cos(alpha) + math.sin(psi) * math.sin(alpha)


def f2(r: float, alpha: float, psi: float, params: Params) -> float:
    sa = math.sqrt(geo.coeffs_mcgehee(r, alpha, params).a)
    return math.sin(psi) * math.cos(alpha) - sa * math.cos(psi) * math.sin(alpha)


def _shell_z(h: float, r: float, alpha: float, psi: float, params: Params):
    E = e_hat(h, r, alpha, params)
    if E < 0.0:
        raise ForbiddenRegion(f"E_hat={E!r} < 0 at r={r!r}, alpha={alpha!r}")
    a = geo.coeffs_mcgehee(r, alpha, params).a
    sq = math.sqrt(E)
    return E, a, sq / math.sqrt(a) * math.cos(psi), sq * math.sin(psi)


def _a_dot(r: float, alpha: float, dr: float, dalpha: float, params: Params) -> float:
    d = geo.coeff_partials_mcgehee(r, alpha, params)
    return d["a_r"] * dr + d["a_alpha"] * dalpha


def ab_triple_tau(y, params: Params) -> ABTriple:
    """A1, A2 and B at a tau-state (the shell is the one through the state).

    B comes from differentiating psi = atan2(z_y, sqrt(a) z_x) along the flow
    and multiplying by sqrt(a z_x^2 + z_y^2) = sqrt(E_hat).
    """
    r, alpha, zx, zy = y
    dr, dalpha, A1, A2 = vf_mcgehee_tau(y, params)
    a = geo.coeffs_mcgehee(r, alpha, params).a
    sa = math.sqrt(a)
    X, Y = sa * zx, zy
    n2 = X * X + Y * Y
    if n2 == 0.0:
        # zero velocity: limit of the on-shell expression with psi = 0
        return ABTriple(A1, A2, A2)
    adot = _a_dot(r, alpha, dr, dalpha, params)
    Xdot = sa * A1 + zx * adot / (2.0 * sa)
    dpsi = (X * A2 - Y * Xdot) / n2
    return ABTriple(A1, A2, math.sqrt(n2) * dpsi)


def ab_triple(state, h: float, params: Params) -> ABTriple:
    """ABTriple for a 4-component tau state or a 3-component (r, alpha, psi) state."""
    if len(state) == 4:
        r, alpha, zx, zy = state
        E = e_hat(h, r, alpha, params)
        a = geo.coeffs_mcgehee(r, alpha, params).a
        lhs = a * zx * zx + zy * zy
        if abs(lhs - E) > 1e-8 * max(abs(E), 1e-300):
            raise OffShell(f"a z_x^2 + z_y^2 = {lhs!r} but E_hat = {E!r}")
        return ab_triple_tau(state, params)
    r, alpha, psi = state
    E, a, zx, zy = _shell_z(h, r, alpha, psi, params)
    if E == 0.0:
        _, _, A1, A2 = vf_mcgehee_tau((r, alpha, 0.0, 0.0), params)
        return ABTriple(A1, A2, A2 * math.cos(psi) - math.sqrt(a) * A1 * math.sin(psi))
    t = ab_triple_tau((r, alpha, zx, zy), params)
    return t


def b_displayed(h: float, r: float, alpha: float, psi: float, params: Params) -> float:
    """B written term by term as
    -sqrt(a) sin(psi) A1 + sqrt(a) sin(psi) cos(psi) d/dtau sqrt(E/a)
    + A2 cos(psi) - d/dtau sqrt(E) sin(psi) cos(psi).
    """
    E, a, zx, zy = _shell_z(h, r, alpha, psi, params)
    dr, dalpha, A1, A2 = vf_mcgehee_tau((r, alpha, zx, zy), params)
    E_r, E_a = e_hat_partials(h, r, alpha, params)
    Edot = E_r * dr + E_a * dalpha
    adot = _a_dot(r, alpha, dr, dalpha, params)
    sqE = math.sqrt(E)
    d_sqrt_E = Edot / (2.0 * sqE)
    d_sqrt_Ea = (Edot / a - E * adot / (a * a)) / (2.0 * math.sqrt(E / a))
    sa = math.sqrt(a)
    sp, cp = math.sin(psi), math.cos(psi)
    return -sa * sp * A1 + sa * sp * cp * d_sqrt_Ea + A2 * cp - d_sqrt_E * sp * cp


def vf_angular_sigma(y, h: float, params: Params) -> np.ndarray:
    """(dr, dalpha, dpsi)/dsigma on the shell h."""
    r, alpha, psi = y
    E, a, zx, zy = _shell_z(h, r, alpha, psi, params)
    cb = geo.coeffs_mcgehee(r, alpha, params)
    sa = math.sqrt(a)
    sp, cp = math.sin(psi), math.cos(psi)
    s, co = math.sin(alpha), math.cos(alpha)
    r2 = r * r
    k1 = sa * cp * co + sp * s
    k2 = sp * co - sa * cp * s
    scale = 2.0 * SIGMA_RATE * E * cb.l
    dr = scale * r * r2 / (2.0 + r2) * k1
    dalpha = scale * k2
    if E == 0.0:
        trip = ab_triple((r, alpha, psi), h, params)
    else:
        trip = ab_triple_tau((r, alpha, zx, zy), params)
    return np.array([dr, dalpha, SIGMA_RATE * trip.B])


def vf_collision_manifold(alpha: float, psi: float, params: Params) -> tuple[float, float]:
    return params.Gamma / (4.0 * math.pi) * math.sin(psi - alpha), 0.0


# --- VectorField -------------------------------------------------------------------------

@dataclass
class VectorField:
    """A chart field bundled with what the integrator and monitors need.

    ``kernel`` names the compiled/pure kernel (see ``kernels``) able to step
    this field; ``None`` means the generic Python stepper is used.
    """

    name: str
    chart: Chart
    time_scale: TimeScale
    params: Params
    rhs: Callable[[np.ndarray], np.ndarray]
    energy: Callable[[np.ndarray], float] | None = None
    h: float | None = None
    kernel: str | None = None
    components: tuple[str, ...] = field(default_factory=tuple)

    def __call__(self, t: float, y) -> np.ndarray:
        return self.rhs(y)


def plane_field(params: Params) -> VectorField:
    return VectorField("plane", Chart.PLANE, TimeScale.PHYSICAL, params,
                       lambda y: vf_plane(y, params), lambda y: k_mech(y, params),
                       kernel="plane", components=("x", "y", "p_x", "p_y"))


def sphere_field(params: Params, vortex_at: VortexAt = VortexAt.NORTH_POLE) -> VectorField:
    name = "sphere-north" if vortex_at is VortexAt.NORTH_POLE else "sphere-equator"
    return VectorField(name, Chart.SPHERE, TimeScale.PHYSICAL, params,
                       lambda y: vf_sphere_vortex(y, params, vortex_at),
                       lambda y: h_sphere(y, params, vortex_at),
                       kernel=name, components=("phi", "theta", "p_phi", "p_theta"))


def geodesic_field(params: Params) -> VectorField:
    return VectorField("sphere-geodesic", Chart.SPHERE, TimeScale.PHYSICAL, params,
                       lambda y: vf_sphere_geodesic(y, params), lambda y: h_sphere_geodesic(y, params),
                       kernel="sphere-geodesic", components=("phi", "theta", "p_phi", "p_theta"))


def meridian_field(params: Params) -> VectorField:
    return VectorField("meridian", Chart.SPHERE, TimeScale.PHYSICAL, params,
                       lambda y: vf_meridian(y, params), lambda y: h_meridian(y, params),
                       kernel="meridian", components=("theta", "p_theta"))


def tau_field(params: Params) -> VectorField:
    def energy(y):
        return k_mech_mcgehee(y, params) if y[0] > 0.0 else math.nan

    return VectorField("mcgehee-tau", Chart.TAU, TimeScale.TAU, params,
                       lambda y: vf_mcgehee_tau(y, params), energy,
                       kernel="mcgehee-tau", components=("r", "alpha", "z_x", "z_y"))


def sigma_field(params: Params, h: float) -> VectorField:
    return VectorField("angular-sigma", Chart.SIGMA, TimeScale.SIGMA, params,
                       lambda y: vf_angular_sigma(y, h, params), None, h=h,
                       components=("r", "alpha", "psi"))


def collision_field(params: Params) -> VectorField:
    def rhs(y):
        return np.array(vf_collision_manifold(y[0], y[1], params))

    return VectorField("collision", Chart.SIGMA, TimeScale.SIGMA, params, rhs,
                       kernel="collision", components=("alpha", "psi"))


# --- finite-difference symplectic gradient ---------------------------------------------------

def symplectic_gradient_fd(H: Callable, y, step: float = 1e-6) -> np.ndarray:
    """(dH/dp, -dH/dq) by central differences, step scaled per component."""
    y = np.asarray(y, dtype=float)
    n = y.size // 2
    grad = np.empty_like(y)
    for i in range(y.size):
        hi = step * max(1.0, abs(y[i]))
        e = np.zeros_like(y)
        e[i] = hi
        grad[i] = (H(y + e) - H(y - e)) / (2.0 * hi)
    return np.concatenate([grad[n:], -grad[:n]])


def printed_north_pole_force(theta: float, params: Params) -> float:
    """Alternative north-pole force with an extra 1/(2R^2) factor; kept for comparison only."""
    return params.k * math.sin(theta) / (2.0 * params.R**2 * (1.0 + math.cos(theta)))
