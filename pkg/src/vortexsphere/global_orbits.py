"""Special orbits with the vortex at the north pole (theta = pi).

Vortex parallels are periodic orbits, vortex meridians are invariant, and
orbits with zero angular momentum that hit the vortex are continued by point
reflection through it.  Meridian motion uses a signed arc angle: negative
theta is the opposite meridian phi0 + pi, the antipodal point is theta = 0
and the vortex is theta = +-pi.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .charts import Chart, TimeScale
from .dynamics import (
    VectorField,
    VortexAt,
    h_meridian,
    meridian_field,
    sphere_field,
    vf_meridian,
    vf_sphere_vortex,
)
from .energy import H2_TOL, thresholds
from .errors import DomainError, NoOrbit, NonzeroAngularMomentum, NotColliding
from .geometry import Params, TWO_PI
from .integrator import (
    EventKind,
    EventSpec,
    IntegratorOptions,
    Trajectory,
    antipodal_event,
    collision_event,
    integrate,
    zero_velocity_event,
)

TIGHT = IntegratorOptions(rel_tol=1e-12, abs_tol=1e-14)


# --- vortex parallels ---------------------------------------------------------------------------

@dataclass
class PeriodicParallel:
    theta_bar: float
    p_phi: float
    period: float
    residual: float
    closing_error: float = math.nan
    p_phi_printed: float = math.nan


def parallel_p_phi_closed(theta_bar: float, params: Params) -> float:
    """p_phi balancing the centrifugal and vortex terms of the implemented field."""
    c = math.cos(theta_bar)
    return math.sqrt(-params.k * params.R**2 * math.sin(theta_bar) ** 4 / (c * (1.0 + c)))


def parallel_p_phi_printed(theta_bar: float, params: Params) -> float:
    """Value from the force term carrying an extra 1/(2R^2); kept for comparison only."""
    c = math.cos(theta_bar)
    return math.sqrt(-params.k * math.sin(theta_bar) ** 4 / (2.0 * c * (1.0 + c)))


def vortex_parallel(theta_bar: float, params: Params, check_closure: bool = True,
                    opts: IntegratorOptions | None = None) -> PeriodicParallel:
    """Periodic orbit on the parallel theta = theta_bar (needs pi/2 < theta_bar < pi)."""
    if not 0.0 < theta_bar < math.pi:
        raise DomainError(f"theta_bar={theta_bar!r} must lie in (0, pi)")
    if theta_bar <= math.pi / 2:
        raise NoOrbit(f"no vortex parallel at theta_bar={theta_bar!r} <= pi/2")

    def pdot_theta(p):
        return vf_sphere_vortex((0.0, theta_bar, p, 0.0), params, VortexAt.NORTH_POLE)[3]

    hi = 1.0
    while pdot_theta(hi) > 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise NoOrbit("no sign change of the theta-force")
    p = brentq(pdot_theta, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    res = abs(pdot_theta(p))
    period = TWO_PI * params.R**2 * math.sin(theta_bar) ** 2 / abs(p)
    out = PeriodicParallel(theta_bar, p, period, res, p_phi_printed=parallel_p_phi_printed(theta_bar, params))
    if check_closure:
        y0 = np.array([0.0, theta_bar, p, 0.0])
        tr = integrate(sphere_field(params, VortexAt.NORTH_POLE), y0, (0.0, period), opts or TIGHT)
        yf = tr.final.copy()
        yf[0] -= TWO_PI
        out.closing_error = float(np.max(np.abs(yf - y0)))
    return out


# --- meridians ------------------------------------------------------------------------------------

def meridian_potential(theta: float, params: Params) -> float:
    # 1 + cos(theta) = 2 cos^2(theta/2), accurate next to the vortex
    c = math.cos(0.5 * theta)
    if c == 0.0:
        return -math.inf
    return params.k * math.log(4.0 * params.R**2 * c * c)


def meridian_momentum(theta: float, h: float, params: Params, sign: float = -1.0) -> float:
    """p_theta on the shell h at theta (sign picks the direction)."""
    gap = h - meridian_potential(theta, params)
    if gap < 0.0:
        raise DomainError(f"theta={theta!r} is forbidden at h={h!r}")
    return math.copysign(params.R * math.sqrt(2.0 * gap), sign)


def meridian_to_sphere(y, phi0: float) -> np.ndarray:
    """Signed meridian state(s) (theta, p_theta) -> sphere (phi, theta, p_phi, p_theta)."""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    th, p = y[:, 0], y[:, 1]
    neg = th < 0.0
    phi = np.where(neg, math.fmod(phi0 + math.pi, TWO_PI), phi0)
    out = np.column_stack([phi, np.abs(th), np.zeros_like(th), np.where(neg, -p, p)])
    return out


@dataclass
class MeridianOrbit:
    phi0: float
    traj: Trajectory

    @property
    def passed_antipode(self) -> bool:
        return self.traj.first(EventKind.ANTIPODAL_PASSAGE) is not None

    def sphere_states(self) -> np.ndarray:
        return meridian_to_sphere(self.traj.y, self.phi0)


def meridian_events(vf: VectorField, terminal_collision: bool = True):
    return [zero_velocity_event(vf), antipodal_event(vf), collision_event(vf, terminal=terminal_collision)]


def meridian_orbit(phi0: float, theta0: float, p_theta0: float, params: Params, t_end: float = 100.0,
                   opts: IntegratorOptions | None = None, t_eval=None) -> MeridianOrbit:
    """Orbit on the vortex meridian phi = phi0 with p_phi = 0, via the reduced system."""
    if not 0.0 <= theta0 < math.pi:
        raise DomainError("theta0 must lie in [0, pi)")
    vf = meridian_field(params)
    tr = integrate(vf, [theta0, p_theta0], (0.0, t_end), opts or TIGHT, events=meridian_events(vf), t_eval=t_eval)
    return MeridianOrbit(phi0, tr)


# --- collision necessity ----------------------------------------------------------------------------

@dataclass
class NecessityReport:
    l: float
    collided: bool
    residual_min: float
    ok: bool
    message: str


def allowed_theta_residual(theta: float, h: float, l: float, params: Params) -> float:
    """2R^2 h sin^2 - (Gamma/4pi) R^2 sin^2 log(2R^2(1+cos)) - l^2, which equals sin^2 p_theta^2."""
    R2 = params.R**2
    s2 = math.sin(theta) ** 2
    return (2.0 * R2 * h * s2 - params.Gamma / (4.0 * math.pi) * R2 * s2
            * math.log(2.0 * R2 * (1.0 + math.cos(theta))) - l * l)


def collision_necessity_check(traj: Trajectory, params: Params, l_tol: float = 1e-8,
                              threshold: float = 1e-6) -> NecessityReport:
    if traj.chart is not Chart.SPHERE:
        raise DomainError("necessity check needs a sphere-chart trajectory")
    meridian = traj.y.shape[1] == 2
    l = 0.0 if meridian else float(traj.y[0, 2])
    kinds = traj.event_kinds()
    collided = EventKind.COLLISION_APPROACH in kinds or EventKind.ANTIPODAL_PASSAGE in kinds
    res_min = math.nan
    ok = True
    msgs = []
    if collided and abs(l) >= l_tol:
        ok = False
        msgs.append(f"collision or antipodal event with l={l:.3e}")
    if abs(l) > threshold:
        y0 = traj.y[0]
        h = h_sphere_from_state(y0, params)
        res_min = min(allowed_theta_residual(y[1], h, l, params) for y in traj.y)
        if res_min < -1e-9:
            ok = False
            msgs.append(f"allowed-theta residual {res_min:.3e} < 0")
    return NecessityReport(l, collided, res_min, ok, "; ".join(msgs) or "ok")


def h_sphere_from_state(y, params: Params) -> float:
    if len(y) == 2:
        return h_meridian(y, params)
    R2 = params.R**2
    kin = (y[3] ** 2 + (y[2] ** 2 / math.sin(y[1]) ** 2 if y[2] != 0.0 else 0.0)) / (2.0 * R2)
    return kin + meridian_potential(y[1], params)


# --- collision transmission ----------------------------------------------------------------------------

@dataclass
class TransmittedPath:
    pre: Trajectory
    phi_V: float
    theta_V: float
    T_s: float
    t_event: float
    h: float
    params: Params
    tail_t: np.ndarray
    tail_theta: np.ndarray

    def pre_state(self, t: float) -> np.ndarray:
        """(theta, p_theta) on the pre segment, t in [0, T_s)."""
        if t <= self.t_event:
            return self.pre.state_at(t)
        theta = float(np.interp(t, self.tail_t, self.tail_theta))
        return np.array([theta, meridian_momentum(theta, self.h, self.params, self._dir)])

    @property
    def _dir(self) -> float:
        return math.copysign(1.0, self.theta_V)

    def post_state(self, t: float) -> np.ndarray:
        """Point reflection: theta(t) = 2 theta_V - theta(2T_s - t), p(t) = p(2T_s - t)."""
        if not self.T_s < t <= 2.0 * self.T_s:
            raise DomainError("post segment lives on (T_s, 2 T_s]")
        th, p = self.pre_state(2.0 * self.T_s - t)
        return np.array([2.0 * self.theta_V - th, p])

    def post_phi(self, t: float) -> float:
        # 2 phi_V - phi(2T_s - t), and phi stays phi_V on the meridian
        return 2.0 * self.phi_V - self.phi_V

    def state(self, t: float) -> np.ndarray:
        if t < self.T_s:
            return self.pre_state(t)
        if t == self.T_s:
            return np.array([self.theta_V, math.copysign(math.inf, self.theta_V)])
        return self.post_state(t)

    def continuity_gap(self, delta: float = 1e-9) -> float:
        """Distance between the one-sided positions next to T_s and the vortex."""
        a = self.pre_state(self.T_s - delta)[0]
        b = self.post_state(self.T_s + delta)[0]
        return max(abs(a - self.theta_V), abs(b - self.theta_V))

    def eom_residual(self, n: int = 100, fd_step: float = 1e-4) -> float:
        """Max finite-difference residual of the meridian equations on the post segment."""
        times = self.interior_post_times(n)
        worst = 0.0
        f = self.post_state
        d = fd_step
        for t in times:
            # five-point central stencil
            ydot = (8.0 * (f(t + d) - f(t - d)) - (f(t + 2 * d) - f(t - 2 * d))) / (12.0 * d)
            y = self.post_state(t)
            worst = max(worst, float(np.max(np.abs(ydot - vf_meridian(y, self.params)))))
        return worst

    def interior_post_times(self, n: int = 100) -> np.ndarray:
        s = np.linspace(0.01 * self.t_event, 0.99 * self.t_event, n)
        return 2.0 * self.T_s - s


def transmit(pre: Trajectory, params: Params, phi0: float = 0.0, n_tail: int = 64) -> TransmittedPath:
    """Continue a colliding meridian orbit through the vortex by point reflection."""
    if not pre.events or pre.events[-1].kind is not EventKind.COLLISION_APPROACH:
        raise NotColliding("trajectory does not end in a collision event")
    if pre.y.shape[1] == 4:
        if abs(pre.y[0, 2]) >= 1e-8:
            raise NonzeroAngularMomentum(f"l={pre.y[0, 2]!r} != 0")
        raise DomainError("pass the meridian reduction of a zero angular momentum orbit")
    ev = pre.events[-1]
    th_e, p_e = ev.state
    h = h_meridian(ev.state, params)
    sgn = math.copysign(1.0, th_e)
    theta_V = sgn * math.pi

    def dt_dtheta(th):
        gap = h - meridian_potential(th, params)
        return 0.0 if math.isinf(gap) else params.R / math.sqrt(2.0 * gap)

    lo, hi = sorted((abs(th_e), math.pi))
    tail_time = quad(dt_dtheta, lo, hi, limit=200, epsabs=1e-14, epsrel=1e-12)[0]
    T_s = ev.time + tail_time
    grid = np.linspace(lo, hi, n_tail)
    cum = [0.0]
    for a, b in zip(grid[:-1], grid[1:]):
        cum.append(cum[-1] + quad(dt_dtheta, a, b, epsabs=1e-15, epsrel=1e-12)[0])
    tail_t = ev.time + np.array(cum)
    tail_t[-1] = T_s
    return TransmittedPath(pre, phi0, theta_V, T_s, ev.time, h, params, tail_t, sgn * grid)


# --- three regimes --------------------------------------------------------------------------------------------

class Behavior(enum.Enum):
    BOUNCE = "BounceBetweenZvmAndVortex"
    ASYMPTOTIC = "AsymptoticToAntipodal"
    THROUGH_ANTIPODAL = "MeridianThroughAntipodal"


EXPECTED_EVENTS = {
    Behavior.BOUNCE: [EventKind.ZERO_VELOCITY_TOUCH, EventKind.COLLISION_APPROACH],
    Behavior.THROUGH_ANTIPODAL: [EventKind.ANTIPODAL_PASSAGE, EventKind.COLLISION_APPROACH],
    Behavior.ASYMPTOTIC: [],
}


@dataclass
class RegimeNarrative:
    h: float
    behavior: Behavior
    demo: Trajectory | None = None

    def describe(self) -> str:
        return {
            Behavior.BOUNCE: "ejected orbit turns at the zero velocity curve and falls back into the vortex",
            Behavior.ASYMPTOTIC: "ejected orbit creeps up to the antipodal rest point",
            Behavior.THROUGH_ANTIPODAL: "ejected orbit crosses the antipodal point and falls into the vortex again",
        }[self.behavior]

    def matches_demo(self) -> bool:
        if self.demo is None:
            return False
        kinds = self.demo.event_kinds()
        return kinds == EXPECTED_EVENTS[self.behavior]


def _h2_shell_field(params: Params) -> VectorField:
    """theta' on the h = h2 shell, heading for theta = 0.

    h2 - V = k log(1 + tan^2(theta/2)); writing the square root as
    tan(theta/2) sqrt(log1p(t^2)/t^2) keeps the field smooth and odd, so
    theta = 0 is a rest point that the solution cannot cross.
    """
    c = math.sqrt(2.0 * params.k) / params.R

    def rhs(y):
        t = math.tan(0.5 * y[0])
        t2 = t * t
        ratio = 1.0 if t2 < 1e-300 else math.log1p(t2) / t2
        return np.array([-c * t * math.sqrt(ratio)])

    return VectorField("meridian-h2-shell", Chart.SPHERE, TimeScale.PHYSICAL, params, rhs, components=("theta",))


DEMO_THETA0 = math.pi - 0.1


def demo_orbit(h: float, params: Params, t_end: float | None = None,
               opts: IntegratorOptions | None = None) -> Trajectory:
    """Ejection-like meridian orbit at energy h: start near the vortex, head for the antipode."""
    h2 = thresholds(params)[1]
    if abs(h - h2) <= H2_TOL:
        vf = _h2_shell_field(params)
        ev = EventSpec(EventKind.ANTIPODAL_PASSAGE, lambda t, y: y[0], 0, False)
        return integrate(vf, [DEMO_THETA0], (0.0, t_end or 1000.0), opts or TIGHT, events=[ev])
    p0 = meridian_momentum(DEMO_THETA0, h, params, -1.0)
    return meridian_orbit(0.0, DEMO_THETA0, p0, params, t_end or 200.0, opts).traj


def classify_transmission(h: float, params: Params, demo: bool = False, t_end: float | None = None) -> RegimeNarrative:
    h2 = thresholds(params)[1]
    if abs(h - h2) <= H2_TOL:
        b = Behavior.ASYMPTOTIC
    elif h < h2:
        b = Behavior.BOUNCE
    else:
        b = Behavior.THROUGH_ANTIPODAL
    out = RegimeNarrative(h, b)
    if demo:
        out.demo = demo_orbit(h, params, t_end)
    return out


def h2_shell_momentum(theta: float, params: Params) -> float:
    h2 = thresholds(params)[1]
    return meridian_momentum(theta, h2, params, -1.0) if h2 >= meridian_potential(theta, params) else 0.0
