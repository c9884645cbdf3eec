"""Energy thresholds, allowed regions and the zero velocity manifold.

On the plane the shell ``K_mech = h`` reads ``a p_x**2 + p_y**2 = E_tilde / l``
with ``E_tilde = h - (Gamma/8pi) log b``.  Motion is allowed where
``E_tilde > 0``.  Since ``log`` is monotone, ``E_tilde = 0`` is the level set
``b = delta`` with ``delta = exp(8 pi h / Gamma)``, a circle ``C_delta``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import geometry as geo
from .errors import AtVortex, DomainError
from .geometry import Params, PlanePoint

H2_TOL = 1e-9


def thresholds(params: Params) -> tuple[float, float]:
    """(h1, h2) = ((Gamma/8pi) log 2R^2, (Gamma/4pi) log 2R)."""
    return (
        params.Gamma / (8.0 * math.pi) * math.log(2.0 * params.R**2),
        params.Gamma / (4.0 * math.pi) * math.log(2.0 * params.R),
    )


def delta_of_h(h: float, params: Params) -> float:
    return math.exp(8.0 * math.pi * h / params.Gamma)


def e_tilde(h: float, p: PlanePoint, params: Params) -> float:
    b = geo.b_xy(p, params)
    if b == 0.0:
        raise AtVortex("E_tilde is singular at the vortex image")
    return h - params.k * math.log(b)


def e_hat(h: float, r: float, alpha: float, params: Params) -> float:
    """McGehee energy function ``(r^2 / l) (h - (Gamma/8pi) log b)``.

    ``log b = log(2R^2 r^2 / c) - 2/r^2`` is expanded so the result stays
    finite where ``b`` underflows; at r = 0 this gives 2 Gamma R^2 / pi.
    """
    if r < 0.0:
        raise DomainError("e_hat needs r >= 0")
    c = geo.mcgehee_c(r, alpha, params)
    inv_l = c * c / (8.0 * params.R**2)
    k = params.k
    if r == 0.0:
        return 2.0 * k * inv_l
    r2 = r * r
    return inv_l * (r2 * (h - k * math.log(2.0 * params.R**2 * r2 / c)) + 2.0 * k)


def e_hat_direct(h: float, r: float, alpha: float, params: Params) -> float:
    """Unsimplified ``(r^2/l)(h - (Gamma/8pi) log b)`` from the McGehee coefficients."""
    cb = geo.coeffs_mcgehee(r, alpha, params)
    return r * r / cb.l * (h - params.k * math.log(cb.b))


def e_hat_limit(params: Params) -> float:
    """Value of E_hat on the collision manifold, independent of h and alpha."""
    return 2.0 * params.Gamma * params.R**2 / math.pi


def e_hat_partials(h: float, r: float, alpha: float, params: Params) -> tuple[float, float]:
    """(dE_hat/dr, dE_hat/dalpha); both vanish at r = 0."""
    if r == 0.0:
        return 0.0, 0.0
    R = params.R
    k = params.k
    c = geo.mcgehee_c(r, alpha, params)
    d = geo.coeff_partials_mcgehee(r, alpha, params)
    c_r, c_a = d["c_r"], d["c_alpha"]
    r2 = r * r
    bracket = h - k * math.log(2.0 * R * R * r2 / c)
    g = r2 * bracket + 2.0 * k
    g_r = 2.0 * r * bracket - 2.0 * k * r + k * r2 * c_r / c
    g_a = k * r2 * c_a / c
    s = 1.0 / (8.0 * R * R)
    return s * (2.0 * c * c_r * g + c * c * g_r), s * (2.0 * c * c_a * g + c * c * g_a)


# --- level circles ------------------------------------------------------------

@dataclass(frozen=True)
class LevelCircle:
    """Level set {b = delta}: a circle, a single point, or the line y = 0."""

    delta: float
    kind: str  # "circle" | "point" | "line"
    center: tuple[float, float] | None = None
    radius: float = 0.0

    def contains(self, x: float, y: float) -> bool:
        if self.kind != "circle":
            return False
        return math.hypot(x - self.center[0], y - self.center[1]) < self.radius


def level_circle(delta: float, params: Params, tol: float = 1e-14) -> LevelCircle:
    R = params.R
    top = 4.0 * R * R
    scale = tol * top
    if delta < -scale or delta > top + scale:
        raise DomainError(f"b only takes values in [0, 4R^2]; got delta={delta!r}")
    if abs(delta) <= scale:
        return LevelCircle(delta, "point", (0.0, 2.0 * R))
    if abs(delta - top) <= scale:
        return LevelCircle(delta, "point", (0.0, -2.0 * R))
    gap = 2.0 * R * R - delta
    if abs(gap) <= scale:
        return LevelCircle(delta, "line")
    center = (0.0, 4.0 * R**3 / gap)
    radius = 2.0 * R / abs(gap) * math.sqrt(4.0 * delta * R * R - delta * delta)
    return LevelCircle(delta, "circle", center, radius)


# --- regimes -------------------------------------------------------------------

class RegimeKind(enum.Enum):
    ALLOWED_EVERYWHERE = "AllowedEverywhere"
    FORBIDDEN_DISK = "ForbiddenDisk"
    ALLOWED_DISK = "AllowedDisk"
    BOUNDARY_H1 = "BoundaryH1"
    BOUNDARY_H2 = "BoundaryH2"


@dataclass(frozen=True)
class EnergyRegime:
    h: float
    kind: RegimeKind
    h1: float
    h2: float
    disk: LevelCircle | None = None

    def allowed(self, x: float, y: float, params: Params) -> bool:
        """Whether E_tilde > 0 at (x, y) according to the classification."""
        kind = self.kind
        if kind is RegimeKind.ALLOWED_EVERYWHERE:
            return True
        if kind is RegimeKind.FORBIDDEN_DISK:
            return not self.disk.contains(x, y)
        if kind is RegimeKind.ALLOWED_DISK:
            return self.disk.contains(x, y)
        if kind is RegimeKind.BOUNDARY_H1:
            return y > 0.0
        return not (x == 0.0 and y == -2.0 * params.R)

    def describe(self) -> str:
        if self.disk is not None and self.disk.kind == "circle":
            cx, cy = self.disk.center
            side = "y<0" if cy < 0 else "y>0"
            return f"{self.kind.value}({side}, center=({cx:.10g}, {cy:.10g}), radius={self.disk.radius:.10g})"
        return self.kind.value


def classify(h: float, params: Params, tol: float = H2_TOL) -> EnergyRegime:
    h1, h2 = thresholds(params)
    if abs(h - h2) < tol:
        kind, disk = RegimeKind.BOUNDARY_H2, level_circle(4.0 * params.R**2, params)
    elif abs(h - h1) < tol:
        kind, disk = RegimeKind.BOUNDARY_H1, level_circle(2.0 * params.R**2, params)
    elif h > h2:
        kind, disk = RegimeKind.ALLOWED_EVERYWHERE, None
    elif h > h1:
        kind, disk = RegimeKind.FORBIDDEN_DISK, level_circle(delta_of_h(h, params), params)
    else:
        kind, disk = RegimeKind.ALLOWED_DISK, level_circle(delta_of_h(h, params), params)
    return EnergyRegime(h, kind, h1, h2, disk)


def sign_grid(h: float, params: Params, n: int = 200, half_width: float | None = None):
    """E_tilde on an n x n grid over [-w, w]^2 (w = 6R by default)."""
    w = 6.0 * params.R if half_width is None else half_width
    xs = np.linspace(-w, w, n)
    X, Y = np.meshgrid(xs, xs, indexing="xy")
    R = params.R
    D = 4.0 * R * R + X * X + Y * Y
    B = 2.0 * R * R * (X * X + (Y - 2.0 * R) ** 2) / D
    with np.errstate(divide="ignore"):
        E = h - params.k * np.log(B)
    return X, Y, E


# --- zero velocity manifold ---------------------------------------------------------

class ZvmTopology(enum.Enum):
    EMPTY = "Empty"
    POINT_LIMIT = "PointLimit"
    CLOSED_CURVE = "ClosedCurve"
    GRAPH_OVER_ALPHA = "GraphOverAlpha"


@dataclass
class ZvmCurve:
    h: float
    topology: ZvmTopology
    alpha: np.ndarray = field(default_factory=lambda: np.empty(0))
    r: np.ndarray = field(default_factory=lambda: np.empty(0))
    xy: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))

    def residuals(self, params: Params) -> np.ndarray:
        return np.array([e_hat(self.h, r, a, params) for r, a in zip(self.r, self.alpha)])


def _to_mcgehee_rows(xy: np.ndarray, params: Params) -> tuple[np.ndarray, np.ndarray]:
    from .charts import phi1_inverse

    dy = xy[:, 1] - 2.0 * params.R
    rho = np.hypot(xy[:, 0], dy)
    r = np.array([phi1_inverse(v) for v in rho])
    alpha = np.mod(np.arctan2(dy, xy[:, 0]), 2.0 * math.pi)
    return r, alpha


def zvm_curve(h: float, params: Params, n_samples: int = 256) -> ZvmCurve:
    from .charts import phi1_inverse

    h1, h2 = thresholds(params)
    R = params.R
    if abs(h - h2) < H2_TOL:
        xy = np.array([[0.0, -2.0 * R]])
        return ZvmCurve(h, ZvmTopology.POINT_LIMIT, np.array([1.5 * math.pi]),
                        np.array([phi1_inverse(4.0 * R)]), xy)
    if h > h2:
        return ZvmCurve(h, ZvmTopology.EMPTY)
    if abs(h - h1) < H2_TOL:
        # degenerate level: the line y = 0, a graph over alpha in (pi, 2pi)
        alpha = np.linspace(math.pi, 2.0 * math.pi, n_samples + 2)[1:-1]
        rho = -2.0 * R / np.sin(alpha)
        xy = np.column_stack([rho * np.cos(alpha), np.zeros_like(alpha)])
        r = np.array([phi1_inverse(v) for v in rho])
        return ZvmCurve(h, ZvmTopology.GRAPH_OVER_ALPHA, alpha, r, xy)
    circle = level_circle(delta_of_h(h, params), params)
    if h > h1:
        t = np.linspace(0.0, 2.0 * math.pi, n_samples, endpoint=False)
        cx, cy = circle.center
        xy = np.column_stack([cx + circle.radius * np.cos(t), cy + circle.radius * np.sin(t)])
        r, alpha = _to_mcgehee_rows(xy, params)
        return ZvmCurve(h, ZvmTopology.CLOSED_CURVE, alpha, r, xy)

    far = abs(circle.center[1] - 2.0 * R) + circle.radius
    r_max = 1.01 * phi1_inverse(far) + 0.01
    alpha = np.linspace(0.0, 2.0 * math.pi, n_samples, endpoint=False)
    r = np.empty_like(alpha)
    for i, a in enumerate(alpha):
        lo, hi = 1e-3, r_max
        if not (e_hat(h, lo, a, params) > 0.0 > e_hat(h, hi, a, params)):
            raise RuntimeError(f"zero velocity root not bracketed at alpha={a!r}")
        r[i] = brentq(lambda rr: e_hat(h, rr, a, params), lo, hi, xtol=1e-14, rtol=1e-15, maxiter=200)
    f = np.array([geo.phi1(v) for v in r])
    xy = np.column_stack([f * np.cos(alpha), f * np.sin(alpha) + 2.0 * R])
    return ZvmCurve(h, ZvmTopology.GRAPH_OVER_ALPHA, alpha, r, xy)


def zvm_restpoint(h: float, params: Params) -> tuple[float, float] | None:
    """Unique rest point on the zero velocity manifold, present only at h = h2.

    Rest points need grad(b)/b = 0, whose only finite solution off the vortex is
    (0, -2R), i.e. phi1(r*) = 4R, alpha* = 3pi/2; it lies on the manifold iff
    E_hat vanishes there, which happens exactly at h = h2.
    """
    from .charts import phi1_inverse

    _, h2 = thresholds(params)
    if abs(h - h2) >= H2_TOL:
        return None
    return phi1_inverse(4.0 * params.R), 1.5 * math.pi


@dataclass(frozen=True)
class ZvmRestpointReport:
    h: float
    point: tuple[float, float] | None
    min_grad_log_b: float  # min |grad b / b| over the sampled manifold
    n_samples: int


def certify_zvm_restpoints(h: float, params: Params, n_samples: int = 512) -> ZvmRestpointReport:
    curve = zvm_curve(h, params, n_samples)
    if curve.topology is ZvmTopology.EMPTY:
        return ZvmRestpointReport(h, None, math.inf, 0)
    g = [math.hypot(*geo.log_b_grad_xy(PlanePoint(x, y), params)) for x, y in curve.xy]
    return ZvmRestpointReport(h, zvm_restpoint(h, params), min(g), len(g))
