"""Adaptive and fixed-step integration of the chart vector fields.

Steps are taken by the kernel layer when the field names a kernel (compiled
or pure Python, see ``kernels``), otherwise by a generic Dormand-Prince step
on ``field.rhs``.  Sign changes of event functions are bracketed on cubic
Hermite dense output and then polished with true partial steps, so event
states and requested sample states carry full step accuracy.
"""
from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass
from dataclasses import field as dc_field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import _kernels_py
from . import kernels as kern
from .charts import Chart, ChartState, TimeScale
from .dynamics import VectorField
from .errors import DomainError
from .geometry import Params


class Scheme(enum.Enum):
    ADAPTIVE45 = "AdaptiveEmbedded45"
    RK4 = "FixedStepRK4"


class EventKind(enum.Enum):
    COLLISION_APPROACH = "CollisionApproach"
    ZERO_VELOCITY_TOUCH = "ZeroVelocityTouch"
    ANTIPODAL_PASSAGE = "AntipodalPassage"
    ENERGY_DRIFT_ALARM = "EnergyDriftAlarm"
    STEP_FAILURE = "StepFailure"


@dataclass
class IntegratorOptions:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    scheme: Scheme = Scheme.ADAPTIVE45
    step: float = 1e-2  # fixed step for RK4
    record_every: float | None = None  # None: every accepted step
    first_step: float | None = None
    max_steps: int = 2_000_000
    drift_alarm: float | None = None
    backend: str | None = None  # None: whatever kernels selected at import

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        if not self.max_step > 0:
            raise DomainError("max_step must be positive")
        if self.scheme is Scheme.RK4 and not self.step > 0:
            raise DomainError("RK4 step must be positive")
        if isinstance(self.scheme, str):
            self.scheme = Scheme(self.scheme)


@dataclass
class EventSpec:
    """``g(t, y)`` crosses zero at the event.  ``guard`` filters located roots."""

    kind: EventKind
    g: Callable[[float, np.ndarray], float]
    direction: int = 0
    terminal: bool = False
    guard: Callable[[float, np.ndarray], bool] | None = None


@dataclass
class Event:
    kind: EventKind
    time: float
    state: np.ndarray
    residual: float = 0.0


@dataclass
class Trajectory:
    chart: Chart
    time_scale: TimeScale
    components: tuple[str, ...]
    t: np.ndarray
    y: np.ndarray
    events: list[Event] = dc_field(default_factory=list)
    monitors: dict[str, np.ndarray] = dc_field(default_factory=dict)
    field: VectorField | None = None
    status: str = "ok"
    message: str = ""
    segments: list[tuple] = dc_field(default_factory=list, repr=False)
    _stepper: object = dc_field(default=None, repr=False)
    _opts: object = dc_field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def final(self) -> np.ndarray:
        return self.y[-1]

    def event_kinds(self) -> list[EventKind]:
        return [e.kind for e in self.events]

    def first(self, kind: EventKind) -> Event | None:
        for e in self.events:
            if e.kind is kind:
                return e
        return None

    def dense(self, t: float) -> np.ndarray:
        """Hermite interpolant over the accepted steps."""
        if not self.segments:
            if len(self.t) and t == self.t[0]:
                return self.y[0].copy()
            raise DomainError("no dense output stored")
        for t0, t1, y0, y1, f0, f1 in self.segments:
            lo, hi = min(t0, t1), max(t0, t1)
            if lo <= t <= hi:
                return hermite(t0, t1, y0, y1, f0, f1, t)
        raise DomainError(f"t={t} outside the integrated span")

    def state_at(self, t: float) -> np.ndarray:
        """State at ``t`` from a true partial step inside the enclosing accepted step."""
        if not self.segments or self._stepper is None:
            return self.dense(t)
        for t0, t1, y0, y1, f0, f1 in self.segments:
            if min(t0, t1) <= t <= max(t0, t1):
                return _partial(self._stepper, self._opts, y0, f0, t - t0)
        raise DomainError(f"t={t} outside the integrated span")


def hermite(t0, t1, y0, y1, f0, f1, t):
    h = t1 - t0
    s = (t - t0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


# --- steppers ------------------------------------------------------------------------------

class _Stepper:
    def __init__(self, vf: VectorField, backend: str | None):
        self.vf = vf
        self.mod = None
        if vf.kernel is not None:
            self.mod = kern if backend is None else kern.backend(backend)
            self.kind = kern.KINDS[vf.kernel]
            self.R = vf.params.R
            self.G = vf.params.Gamma

    def f(self, y):
        if self.mod is not None:
            return self.mod.rhs(self.kind, self.R, self.G, y)
        try:
            return np.asarray(self.vf.rhs(y), dtype=float)
        except (DomainError, ZeroDivisionError, OverflowError, ValueError):
            return np.full(len(y), np.nan)

    def dp45(self, y, f0, h):
        if self.mod is not None:
            return self.mod.dp45_step(self.kind, self.R, self.G, y, f0, h)
        ks = [f0]
        for i in range(1, 7):
            row = _kernels_py._A[i]
            yi = y + h * sum(row[m] * ks[m] for m in range(i))
            ks.append(self.f(yi))
        err = h * sum(_kernels_py._E[m] * ks[m] for m in range(7))
        return yi, err, ks[6]

    def rk4(self, y, h):
        if self.mod is not None:
            return self.mod.rk4_step(self.kind, self.R, self.G, y, h)
        k1 = self.f(y)
        k2 = self.f(y + 0.5 * h * k1)
        k3 = self.f(y + 0.5 * h * k2)
        k4 = self.f(y + h * k3)
        return y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _initial_state(vf: VectorField, s0) -> np.ndarray:
    if isinstance(s0, ChartState):
        if s0.chart is not vf.chart:
            raise DomainError(f"state chart {s0.chart.value} does not match field chart {vf.chart.value}")
        y0 = s0.as_array()
    else:
        y0 = np.array(s0, dtype=float)
    if vf.components and y0.size != len(vf.components):
        raise DomainError(f"{vf.name} needs {len(vf.components)} coordinates, got {y0.size}")
    if not np.all(np.isfinite(y0)):
        raise DomainError("initial state is not finite")
    f0 = np.asarray(vf.rhs(y0), dtype=float)  # raises the chart's DomainError if singular
    if not np.all(np.isfinite(f0)):
        raise DomainError(f"{vf.name} is singular at the initial state")
    return y0


def integrate(vf: VectorField, s0, span, opts: IntegratorOptions | None = None,
              events: Sequence[EventSpec] = (), t_eval: Sequence[float] | None = None) -> Trajectory:
    """Integrate ``vf`` from ``s0`` over ``span = (t0, t1)`` (t1 < t0 runs backward).

    With ``t_eval`` (or ``opts.record_every``) samples are taken at exactly
    those times; otherwise every accepted step is recorded.
    """
    opts = opts or IntegratorOptions()
    t0, t1 = float(span[0]), float(span[1])
    y0 = _initial_state(vf, s0)
    st = _Stepper(vf, opts.backend)
    d = 1.0 if t1 >= t0 else -1.0

    if t_eval is None and opts.record_every is not None:
        n = int(math.floor(abs(t1 - t0) / opts.record_every + 1e-9))
        t_eval = [t0 + d * k * opts.record_every for k in range(n + 1)]
        if abs(t_eval[-1] - t1) > 1e-12 * max(1.0, abs(t1)):
            t_eval.append(t1)
    pending = None if t_eval is None else sorted((float(v) for v in t_eval), key=lambda v: d * v)
    pi = 0

    ts: list[float] = []
    ys: list[np.ndarray] = []
    if pending is None or (pending and pending[0] == t0):
        ts.append(t0)
        ys.append(y0.copy())
        pi = 1 if pending else 0

    traj = Trajectory(vf.chart, vf.time_scale, tuple(vf.components), np.array([]), np.array([]), field=vf,
                      _stepper=st, _opts=opts)
    if t1 == t0:
        traj.t = np.array(ts if ts else [t0])
        traj.y = np.array(ys if ys else [y0])
        _fill_monitors(traj)
        return traj

    H0 = vf.energy(y0) if (opts.drift_alarm is not None and vf.energy is not None) else None
    alarmed = False

    t, y = t0, y0
    f = st.f(y)
    g_prev = [ev.g(t, y) for ev in events]
    span_len = abs(t1 - t0)
    if opts.scheme is Scheme.RK4:
        h = min(opts.step, opts.max_step, span_len)
    else:
        h = opts.first_step or _first_step(st, y, f, opts, span_len)
    min_h = 1e-14 * max(1.0, abs(t0), abs(t1))
    stop = False
    nsteps = 0

    while d * (t1 - t) > 1e-15 * max(1.0, abs(t1)) and not stop:
        nsteps += 1
        if nsteps > opts.max_steps:
            traj.status, traj.message = "failed", "maximum number of steps exceeded"
            traj.events.append(Event(EventKind.STEP_FAILURE, t, y.copy()))
            break
        h = min(h, opts.max_step, abs(t1 - t))
        if opts.scheme is Scheme.RK4:
            y_new = st.rk4(y, d * h)
            f_new = st.f(y_new)
            ok = np.all(np.isfinite(y_new)) and np.all(np.isfinite(f_new))
            if not ok:
                traj.status, traj.message = "failed", f"non-finite state at t={t:.17g}"
                traj.events.append(Event(EventKind.STEP_FAILURE, t, y.copy()))
                break
            h_next = h
        else:
            y_new, err, f_new = st.dp45(y, f, d * h)
            if not (np.all(np.isfinite(y_new)) and np.all(np.isfinite(err)) and np.all(np.isfinite(f_new))):
                h *= 0.25
                if h < min_h:
                    traj.status, traj.message = "failed", f"step size underflow at t={t:.17g}"
                    traj.events.append(Event(EventKind.STEP_FAILURE, t, y.copy()))
                    break
                continue
            scale = opts.abs_tol + opts.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            en = float(np.max(np.abs(err) / scale))
            if en > 1.0:
                h *= max(0.2, 0.9 * en ** -0.2)
                if h < min_h:
                    traj.status, traj.message = "failed", f"step size underflow at t={t:.17g}"
                    traj.events.append(Event(EventKind.STEP_FAILURE, t, y.copy()))
                    break
                continue
            h_next = h * (5.0 if en == 0.0 else min(5.0, 0.9 * en ** -0.2))

        t_new = t + d * h
        if abs(t1 - t_new) <= 1e-15 * max(1.0, abs(t1)):
            t_new = t1
        seg = (t, t_new, y, y_new, f, f_new)
        traj.segments.append(seg)

        # events inside this step
        hit = None
        g_new = [ev.g(t_new, y_new) for ev in events]
        for i, ev in enumerate(events):
            te = _locate(ev, seg, g_prev[i], g_new[i], st, opts)
            if te is None:
                continue
            ye = _partial(st, opts, y, f, te - t)
            if ev.guard is not None and not ev.guard(te, ye):
                continue
            traj.events.append(Event(ev.kind, te, ye, abs(ev.g(te, ye))))
            if ev.terminal and (hit is None or d * te < d * hit[0]):
                hit = (te, ye)
        g_prev = g_new
        t_end = t_new if hit is None else hit[0]

        if pending is None:
            if hit is None:
                ts.append(t_new)
                ys.append(y_new.copy())
        else:
            while pi < len(pending) and d * pending[pi] <= d * t_end:
                ts.append(pending[pi])
                ys.append(y_new.copy() if pending[pi] == t_new else _partial(st, opts, y, f, pending[pi] - t))
                pi += 1
        if hit is not None:
            if not ts or ts[-1] != hit[0]:
                ts.append(hit[0])
                ys.append(hit[1])
            traj.events.sort(key=lambda e: d * e.time)
            traj.events = [e for e in traj.events if d * e.time <= d * hit[0]]
            traj.status, traj.message = "terminated", f"terminal event {traj.events[-1].kind.value}"
            stop = True

        if H0 is not None and not alarmed and abs(vf.energy(y_new) - H0) > opts.drift_alarm:
            traj.events.append(Event(EventKind.ENERGY_DRIFT_ALARM, t_new, y_new.copy(),
                                     abs(vf.energy(y_new) - H0)))
            alarmed = True

        t, y, f = t_new, y_new, f_new
        h = h_next

    if traj.status != "terminated":
        traj.events.sort(key=lambda e: d * e.time)
    traj.t = np.array(ts)
    traj.y = np.array(ys).reshape(len(ts), y0.size)
    _fill_monitors(traj)
    return traj


def _first_step(st: _Stepper, y, f, opts: IntegratorOptions, span_len: float) -> float:
    scale = opts.abs_tol + opts.rel_tol * np.abs(y)
    d0 = float(np.max(np.abs(y) / scale))
    d1 = float(np.max(np.abs(f) / scale))
    h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    return min(h, span_len, opts.max_step)


def _partial(st: _Stepper, opts: IntegratorOptions, y, f, dt: float) -> np.ndarray:
    """State after a true partial step of length ``dt`` from ``y``."""
    if dt == 0.0:
        return y.copy()
    if opts.scheme is Scheme.RK4:
        return st.rk4(y, dt)
    return st.dp45(y, f, dt)[0]


def _crosses(ev: EventSpec, ga: float, gb: float) -> bool:
    if not (np.isfinite(ga) and np.isfinite(gb)) or ga == 0.0:
        return False
    if ga * gb > 0.0:
        return False
    if ev.direction > 0:
        return gb >= 0.0 and ga < 0.0
    if ev.direction < 0:
        return gb <= 0.0 and ga > 0.0
    return True


def _locate(ev: EventSpec, seg, ga, gb, st: _Stepper, opts: IntegratorOptions) -> float | None:
    """Event time inside the step, or None.

    The bracket comes from Hermite dense output (step ends plus interior
    nodes so that a double crossing inside one step is not missed); the root
    is then polished on true partial steps.
    """
    t0, t1, y0, y1, f0, f1 = seg
    nodes = np.linspace(t0, t1, 9)
    vals = [ga] + [ev.g(tn, hermite(t0, t1, y0, y1, f0, f1, tn)) for tn in nodes[1:-1]] + [gb]
    for i in range(len(nodes) - 1):
        if _crosses(ev, vals[i], vals[i + 1]):
            a, b = nodes[i], nodes[i + 1]
            if vals[i + 1] == 0.0:
                return float(b)

            def g_true(tt):
                return ev.g(tt, _partial(st, opts, y0, f0, tt - t0))

            ga_t, gb_t = g_true(a), g_true(b)
            if not (np.isfinite(ga_t) and np.isfinite(gb_t)) or ga_t * gb_t > 0.0:
                # interpolant and true step disagree at this resolution; fall back to interpolant
                return float(brentq(lambda tt: ev.g(tt, hermite(t0, t1, y0, y1, f0, f1, tt)),
                                    min(a, b), max(a, b), xtol=1e-13, rtol=1e-15))
            return float(brentq(g_true, min(a, b), max(a, b), xtol=1e-13, rtol=1e-15))
    return None


# --- monitors --------------------------------------------------------------------------------

def _fill_monitors(traj: Trajectory) -> None:
    vf = traj.field
    n = len(traj.t)
    nan = np.full(n, np.nan)
    energy = nan.copy()
    if vf is not None and vf.energy is not None:
        energy = np.array([_safe(vf.energy, y) for y in traj.y])
    p_phi = nan.copy()
    if traj.chart is Chart.SPHERE:
        p_phi = traj.y[:, 2].copy() if traj.y.shape[1] == 4 else np.zeros(n)
    r = nan.copy()
    e_hat_s = nan.copy()
    if traj.chart in (Chart.TAU, Chart.SIGMA) and traj.y.shape[1] >= 3:
        r = traj.y[:, 0].copy()
        from .geometry import coeffs_mcgehee
        from .energy import e_hat

        if traj.chart is Chart.TAU:
            vals = []
            for y in traj.y:
                c = coeffs_mcgehee(y[0], y[1], vf.params)
                vals.append(c.a * y[2] ** 2 + y[3] ** 2)
            e_hat_s = np.array(vals)
        elif vf is not None and vf.h is not None:
            e_hat_s = np.array([_safe(lambda y: e_hat(vf.h, y[0], y[1], vf.params), y) for y in traj.y])
    traj.monitors = {"energy": energy, "p_phi": p_phi, "r": r, "E_hat": e_hat_s}


def _safe(fn, y) -> float:
    try:
        return float(fn(y))
    except (DomainError, ZeroDivisionError, ValueError, OverflowError):
        return math.nan


def monitor_energy(traj: Trajectory, params: Params | None = None) -> np.ndarray:
    """Per-sample |H(state) - H(state_0)|."""
    vf = traj.field
    if vf is None or vf.energy is None or traj.chart is Chart.SIGMA:
        raise DomainError("trajectory chart has no associated Hamiltonian")
    H = np.array([vf.energy(y) for y in traj.y])
    return np.abs(H - H[0])


@dataclass
class AngularMomentumReport:
    p_phi_drift: np.ndarray
    l_mismatch: np.ndarray
    l: np.ndarray

    @property
    def max_drift(self) -> float:
        return float(np.max(self.p_phi_drift)) if self.p_phi_drift.size else 0.0

    @property
    def max_mismatch(self) -> float:
        return float(np.max(self.l_mismatch)) if self.l_mismatch.size else 0.0


def monitor_angular_momentum(traj: Trajectory, params: Params) -> AngularMomentumReport:
    """p_phi drift and the cross-check l = R^2 sin^2(theta) dphi/dt against p_phi."""
    if traj.chart is not Chart.SPHERE:
        raise DomainError("angular momentum monitor needs a sphere-chart trajectory")
    n = len(traj.t)
    if traj.y.shape[1] == 2:  # meridian reduction carries p_phi = 0 exactly
        z = np.zeros(n)
        return AngularMomentumReport(z, z.copy(), z.copy())
    vf = traj.field
    p = traj.y[:, 2]
    phidot = np.array([vf.rhs(y)[0] for y in traj.y])
    l = params.R**2 * np.sin(traj.y[:, 1]) ** 2 * phidot
    return AngularMomentumReport(np.abs(p - p[0]), np.abs(l - p), l)


# --- event factories ---------------------------------------------------------------------------

def vortex_chord_sq(vf: VectorField, y) -> float:
    """Squared chord distance to the vortex in the field's chart."""
    R = vf.params.R
    if vf.chart is Chart.PLANE:
        D = 4.0 * R * R + y[0] ** 2 + y[1] ** 2
        return 2.0 * R * R * (y[0] ** 2 + (y[1] - 2.0 * R) ** 2) / D
    if vf.chart is Chart.SPHERE:
        if vf.kernel == "sphere-equator":
            return 2.0 * R * R * (1.0 - math.sin(y[1]) * math.sin(y[0]))
        theta = y[0] if len(y) == 2 else y[1]
        return 2.0 * R * R * (1.0 + math.cos(theta))
    raise DomainError("chord distance is defined on the sphere and plane charts")


def collision_event(vf: VectorField, r_min: float = 1e-4, chord2_min: float = 1e-8,
                    terminal: bool = True) -> EventSpec:
    if vf.chart in (Chart.TAU, Chart.SIGMA):
        return EventSpec(EventKind.COLLISION_APPROACH, lambda t, y: y[0] - r_min, -1, terminal)
    return EventSpec(EventKind.COLLISION_APPROACH, lambda t, y: vortex_chord_sq(vf, y) - chord2_min,
                     -1, terminal)


def zero_velocity_event(vf: VectorField, eps: float = 1e-6, terminal: bool = False) -> EventSpec:
    """Turning points: the radial momentum changes sign while the kinetic energy is below ``eps``."""
    R = vf.params.R
    if vf.chart is Chart.SPHERE:
        if len(vf.components) == 2:
            def kin(y):
                return y[1] ** 2 / (2.0 * R * R)

            return EventSpec(EventKind.ZERO_VELOCITY_TOUCH, lambda t, y: y[1], 0, terminal,
                             guard=lambda t, y: kin(y) < eps)

        def kin4(y):
            return (y[3] ** 2 + y[2] ** 2 / math.sin(y[1]) ** 2) / (2.0 * R * R)

        return EventSpec(EventKind.ZERO_VELOCITY_TOUCH, lambda t, y: y[3], 0, terminal,
                         guard=lambda t, y: kin4(y) < eps)
    if vf.chart is Chart.PLANE:
        from .geometry import PlanePoint, coeffs_xy

        def kin_p(y):
            c = coeffs_xy(PlanePoint(y[0], y[1]), vf.params)
            return c.al * y[2] ** 2 + c.l * y[3] ** 2

        # the kinetic energy has a local minimum where its time derivative changes sign
        def dkin(t, y):
            e = 1e-7
            fy = vf.rhs(y)
            return (kin_p(y + e * fy) - kin_p(y - e * fy)) / (2 * e)

        return EventSpec(EventKind.ZERO_VELOCITY_TOUCH, dkin, 1, terminal, guard=lambda t, y: kin_p(y) < eps)
    if vf.chart is Chart.TAU:
        from .geometry import coeffs_mcgehee

        def ehat(y):
            return coeffs_mcgehee(y[0], y[1], vf.params).a * y[2] ** 2 + y[3] ** 2

        return EventSpec(EventKind.ZERO_VELOCITY_TOUCH, lambda t, y: ehat(y) - eps, -1, terminal)
    raise DomainError("zero-velocity events need a chart with momenta")


def antipodal_event(vf: VectorField, terminal: bool = False) -> EventSpec:
    if vf.chart is not Chart.SPHERE or len(vf.components) != 2:
        raise DomainError("antipodal passage is tracked on the meridian reduction")
    return EventSpec(EventKind.ANTIPODAL_PASSAGE, lambda t, y: y[0], 0, terminal)


# --- export ------------------------------------------------------------------------------------

def _fmt(v) -> str:
    return "%.17g" % v


def trajectory_csv(traj: Trajectory) -> str:
    out = io.StringIO()
    cols = ["time", *traj.components, "energy", "p_phi", "r", "E_hat"]
    out.write(",".join(cols) + "\n")
    mon = traj.monitors
    for i, t in enumerate(traj.t):
        row = [t, *traj.y[i], mon["energy"][i], mon["p_phi"][i], mon["r"][i], mon["E_hat"][i]]
        out.write(",".join(_fmt(v) for v in row) + "\n")
    return out.getvalue()


def events_csv(traj: Trajectory) -> str:
    out = io.StringIO()
    out.write(",".join(["time", "kind", *traj.components]) + "\n")
    for e in traj.events:
        out.write(",".join([_fmt(e.time), e.kind.value, *(_fmt(v) for v in e.state)]) + "\n")
    return out.getvalue()
