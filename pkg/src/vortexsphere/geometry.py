"""Sphere parameterization, stereographic projection and metric/potential coefficients.

The sphere has radius ``R`` and centre ``(0, 0, R)``; it touches the plane
``z = 0`` at the origin (south pole) and is projected from the north pole
``(0, 0, 2R)``.  The vortex sits at ``Q = (0, R, R)``, whose stereographic
image is ``V = (0, 2R)``.

Plane coefficients (``rho2 = x**2 + y**2``, ``D = 4R**2 + rho2``)::

    a  = (D / (4 R sqrt(rho2)))**2        ~ 1/sin(theta)**2
    l  = 8 R**2 / D**2
    b  = 2 R**2 (x**2 + (y - 2R)**2) / D  squared chord to the vortex
    al = a * l = 1 / (2 rho2)

In McGehee variables ``x = phi1(r) cos(alpha)``, ``y = phi1(r) sin(alpha) + 2R``
the denominator ``D`` becomes ``c(r, alpha) = 8R**2 + phi1**2 + 4R phi1 sin(alpha)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AtVortex, DomainError, NorthPole, OffSphere, OriginSingular

TWO_PI = 2.0 * math.pi
ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class Params:
    """Sphere radius and vortex circulation (attracting case only)."""

    R: float = 1.0
    Gamma: float = 1.0

    def __post_init__(self):
        if not (self.R > 0 and math.isfinite(self.R)):
            raise DomainError(f"radius must be positive, got {self.R!r}")
        if not (self.Gamma > 0 and math.isfinite(self.Gamma)):
            raise DomainError(f"Gamma must be positive, got {self.Gamma!r}")

    @property
    def vortex_plane(self) -> tuple[float, float]:
        return (0.0, 2.0 * self.R)

    @property
    def k(self) -> float:
        """Potential prefactor Gamma / (8 pi)."""
        return self.Gamma / (8.0 * math.pi)


@dataclass(frozen=True)
class SpherePoint:
    phi: float
    theta: float

    def normalized(self) -> "SpherePoint":
        return SpherePoint(wrap_angle(self.phi), clamp_theta(self.theta))


@dataclass(frozen=True)
class PlanePoint:
    x: float
    y: float

    def is_origin(self) -> bool:
        return self.x == 0.0 and self.y == 0.0

    def is_vortex(self, params: Params) -> bool:
        return self.x == 0.0 and self.y == 2.0 * params.R


@dataclass(frozen=True)
class CoeffBundle:
    """Metric and potential coefficients at one point.

    ``c`` is only meaningful for McGehee arguments and is NaN otherwise.
    """

    a: float
    l: float
    b: float
    al: float
    c: float = math.nan


@dataclass(frozen=True)
class CoeffGrads:
    """Cartesian partial derivatives of a, a*l, l and b."""

    a_x: float
    a_y: float
    al_x: float
    al_y: float
    l_x: float
    l_y: float
    b_x: float
    b_y: float


def wrap_angle(angle: float) -> float:
    """Wrap into [0, 2pi)."""
    w = math.fmod(angle, TWO_PI)
    if w < 0.0:
        w += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2pi
    if w >= TWO_PI:
        w = 0.0
    return w


def clamp_theta(theta: float, tol: float = ANGLE_TOL) -> float:
    if -tol <= theta < 0.0:
        return 0.0
    if math.pi < theta <= math.pi + tol:
        return math.pi
    if not 0.0 <= theta <= math.pi:
        raise DomainError(f"theta={theta!r} outside [0, pi]")
    return theta


# --- sphere and projection -------------------------------------------------

def sphere_param(p: SpherePoint, params: Params) -> np.ndarray:
    """Embedded point R (sin t cos p, sin t sin p, 1 - cos t)."""
    R = params.R
    st = math.sin(p.theta)
    return np.array(
        [R * st * math.cos(p.phi), R * st * math.sin(p.phi), R * (1.0 - math.cos(p.theta))]
    )


def stereo_project(P, params: Params, tol: float = 1e-12) -> PlanePoint:
    x, y, z = (float(v) for v in P)
    two_r = 2.0 * params.R
    if abs(two_r - z) <= tol * two_r:
        raise NorthPole(f"z={z!r} is the projection pole")
    f = two_r / (two_r - z)
    return PlanePoint(f * x, f * y)


def stereo_inverse(p: PlanePoint, params: Params) -> SpherePoint:
    rho = math.hypot(p.x, p.y)
    if rho == 0.0:
        return SpherePoint(0.0, 0.0)
    phi = wrap_angle(math.atan2(p.y, p.x))
    theta = 2.0 * math.atan(rho / (2.0 * params.R))
    return SpherePoint(phi, theta)


def chord_sq(p: SpherePoint, params: Params) -> float:
    """Squared chord from p to the vortex Q = (0, R, R)."""
    return 2.0 * params.R**2 * (1.0 - math.sin(p.theta) * math.sin(p.phi))


def geodesic_distance(p1, p2, r: float, center=(0.0, 0.0, 0.0), tol: float = 1e-9) -> float:
    """Great-circle distance ``r * arccos(<x, y> / r**2)`` between two sphere points.

    Vectors are taken relative to ``center``; pass ``(0, 0, R)`` for the
    sphere used elsewhere in the package.
    """
    c = np.asarray(center, dtype=float)
    u = np.asarray(p1, dtype=float) - c
    v = np.asarray(p2, dtype=float) - c
    for w in (u, v):
        if abs(np.linalg.norm(w) - r) > tol * max(1.0, r):
            raise OffSphere(f"|x|={np.linalg.norm(w)!r} but r={r!r}")
    cosang = float(np.dot(u, v)) / (r * r)
    return r * math.acos(min(1.0, max(-1.0, cosang)))


# --- plane coefficients ----------------------------------------------------

def coeffs_xy(p: PlanePoint, params: Params) -> CoeffBundle:
    R = params.R
    x, y = p.x, p.y
    rho2 = x * x + y * y
    D = 4.0 * R * R + rho2
    l = 8.0 * R * R / (D * D)
    b = 2.0 * R * R * (x * x + (y - 2.0 * R) ** 2) / D
    if rho2 == 0.0:
        raise OriginSingular("a and a*l are singular at the plane origin")
    a = D * D / (16.0 * R * R * rho2)
    return CoeffBundle(a=a, l=l, b=b, al=1.0 / (2.0 * rho2))


def l_xy(p: PlanePoint, params: Params) -> float:
    D = 4.0 * params.R**2 + p.x * p.x + p.y * p.y
    return 8.0 * params.R**2 / (D * D)


def b_xy(p: PlanePoint, params: Params) -> float:
    R = params.R
    D = 4.0 * R * R + p.x * p.x + p.y * p.y
    return 2.0 * R * R * (p.x * p.x + (p.y - 2.0 * R) ** 2) / D


def coeff_grads_xy(p: PlanePoint, params: Params) -> CoeffGrads:
    R = params.R
    x, y = p.x, p.y
    rho2 = x * x + y * y
    if rho2 == 0.0:
        raise OriginSingular("gradient of a*l is singular at the plane origin")
    D = 4.0 * R * R + rho2
    D2 = D * D
    D3 = D2 * D
    rho4 = rho2 * rho2
    # d a / d x = x D (rho2 - 4R^2) / (8 R^2 rho2^2)
    ga = D * (rho2 - 4.0 * R * R) / (8.0 * R * R * rho4)
    return CoeffGrads(
        a_x=x * ga,
        a_y=y * ga,
        al_x=-x / rho4,
        al_y=-y / rho4,
        l_x=-32.0 * R * R * x / D3,
        l_y=-32.0 * R * R * y / D3,
        b_x=16.0 * R**3 * x * y / D2,
        b_y=8.0 * R**3 * (y * y - x * x - 4.0 * R * R) / D2,
    )


def l_b_grads_xy(p: PlanePoint, params: Params) -> tuple[float, float, float, float]:
    """(l_x, l_y, b_x, b_y); unlike ``coeff_grads_xy`` these exist at the origin."""
    R = params.R
    x, y = p.x, p.y
    D = 4.0 * R * R + x * x + y * y
    D2 = D * D
    return (-32.0 * R * R * x / (D2 * D), -32.0 * R * R * y / (D2 * D),
            16.0 * R**3 * x * y / D2, 8.0 * R**3 * (y * y - x * x - 4.0 * R * R) / D2)


def log_b_grad_xy(p: PlanePoint, params: Params) -> tuple[float, float]:
    """(b_x / b, b_y / b), simplified so no 0/0 appears away from the vortex."""
    R = params.R
    x, y = p.x, p.y
    N = x * x + (y - 2.0 * R) ** 2
    if N == 0.0:
        raise AtVortex("log b is singular at the vortex image (0, 2R)")
    D = 4.0 * R * R + x * x + y * y
    return 8.0 * R * x * y / (D * N), 4.0 * R * (y * y - x * x - 4.0 * R * R) / (D * N)


# --- McGehee radial functions ---------------------------------------------

def phi1(r: float) -> float:
    """r exp(-1/r**2), extended by 0 at r = 0."""
    if r <= 0.0:
        if r < 0.0:
            raise DomainError("phi1 needs r >= 0")
        return 0.0
    return r * math.exp(-1.0 / (r * r))


def phi2(r: float) -> float:
    if r <= 0.0:
        raise DomainError("phi2 = 1/r needs r > 0")
    return 1.0 / r


def phi1_prime(r: float) -> float:
    if r <= 0.0:
        return 0.0
    r2 = r * r
    return math.exp(-1.0 / r2) * (1.0 + 2.0 / r2)


def mcgehee_c(r: float, alpha: float, params: Params) -> float:
    R = params.R
    f = phi1(r)
    return 8.0 * R * R + f * f + 4.0 * R * f * math.sin(alpha)


def coeffs_mcgehee(r: float, alpha: float, params: Params) -> CoeffBundle:
    """Coefficients at x = phi1 cos(alpha), y = phi1 sin(alpha) + 2R.

    At r = 0 (phi1 = 0) the expressions reduce to the collision limits
    a = 1, b = 0, l = 1/(8R^2), c = 8R^2 without special casing.
    """
    if r < 0.0:
        raise DomainError("McGehee radius must be >= 0")
    R = params.R
    f = phi1(r)
    c = 8.0 * R * R + f * f + 4.0 * R * f * math.sin(alpha)
    rho2 = c - 4.0 * R * R
    if rho2 <= 0.0:
        raise OriginSingular("McGehee point maps to the plane origin")
    return CoeffBundle(
        a=c * c / (16.0 * R * R * rho2),
        l=8.0 * R * R / (c * c),
        b=2.0 * R * R * f * f / c,
        al=1.0 / (2.0 * rho2),
        c=c,
    )


def coeff_partials_mcgehee(r: float, alpha: float, params: Params) -> dict:
    """Partial derivatives of a and b with respect to r and alpha."""
    R = params.R
    f = phi1(r)
    fp = phi1_prime(r)
    s, co = math.sin(alpha), math.cos(alpha)
    c = 8.0 * R * R + f * f + 4.0 * R * f * s
    rho2 = c - 4.0 * R * R
    c_r = (2.0 * f + 4.0 * R * s) * fp
    c_a = 4.0 * R * f * co
    da_dc = c * (c - 8.0 * R * R) / (16.0 * R * R * rho2 * rho2)
    # b = 2R^2 f^2 / c
    b_f = 4.0 * R * R * f / c
    b_c = -2.0 * R * R * f * f / (c * c)
    return {
        "a_r": da_dc * c_r,
        "a_alpha": da_dc * c_a,
        "b_r": b_f * fp + b_c * c_r,
        "b_alpha": b_c * c_a,
        "c_r": c_r,
        "c_alpha": c_a,
    }


def scaled_log_b_grad(r: float, alpha: float, params: Params) -> tuple[float, float]:
    """(r^3 e^{-1/r^2} b_x/b, r^3 e^{-1/r^2} b_y/b) in closed form.

    Both are O(r^2) as r -> 0; the phi1 factors cancel analytically.
    """
    R = params.R
    f = phi1(r)
    s, co = math.sin(alpha), math.cos(alpha)
    c = 8.0 * R * R + f * f + 4.0 * R * f * s
    y = f * s + 2.0 * R
    r2 = r * r
    gx = 8.0 * R * r2 * co * y / c
    gy = 4.0 * R * r2 * (4.0 * R * s - f * (co * co - s * s)) / c
    return gx, gy


def mcgehee_to_xy(r: float, alpha: float, params: Params) -> PlanePoint:
    f = phi1(r)
    return PlanePoint(f * math.cos(alpha), f * math.sin(alpha) + 2.0 * params.R)
