"""Pure-Python stepping kernels (fallback for the compiled ``_kernels`` module).

Keep in lockstep with ``_kernels.pyx``: same field codes, same formulas,
same return conventions.  A singular evaluation yields NaNs instead of
raising, so the adaptive stepper can shrink the step and report failure.
"""
import math

import numpy as np

PLANE = 0
SPHERE_NORTH = 1
SPHERE_EQUATOR = 2
SPHERE_GEODESIC = 3
MERIDIAN = 4
MCGEHEE_TAU = 5
COLLISION = 6

DIMS = (4, 4, 4, 4, 2, 4, 2)

BACKEND = "python"

# Dormand-Prince 5(4)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


def _plane(R, G, y):
    x, yy, px, py = y
    k = G / (8.0 * math.pi)
    rho2 = x * x + yy * yy
    D = 4.0 * R * R + rho2
    N = x * x + (yy - 2.0 * R) ** 2
    rho4 = rho2 * rho2
    D3 = D * D * D
    l = 8.0 * R * R / (D * D)
    al = 1.0 / (2.0 * rho2)
    lbx = 8.0 * R * x * yy / (D * N)
    lby = 4.0 * R * (yy * yy - x * x - 4.0 * R * R) / (D * N)
    return [
        2.0 * al * px,
        2.0 * l * py,
        -(-x / rho4 * px * px - 32.0 * R * R * x / D3 * py * py + k * lbx),
        -(-yy / rho4 * px * px - 32.0 * R * R * yy / D3 * py * py + k * lby),
    ]


def _sphere(R, G, y, mode):
    phi, theta, pphi, ptheta = y
    st = math.sin(theta)
    ct = math.cos(theta)
    R2 = R * R
    k = G / (8.0 * math.pi)
    if st == 0.0:
        raise ZeroDivisionError("pole")
    cf = 0.0 if pphi == 0.0 else ct / (R2 * st * st * st) * pphi * pphi
    out = [pphi / (R2 * st * st), ptheta / R2, 0.0, cf]
    if mode == SPHERE_NORTH:
        out[3] += k * math.sin(0.5 * theta) / math.cos(0.5 * theta)
    elif mode == SPHERE_EQUATOR:
        sp = math.sin(phi)
        q = 1.0 - st * sp
        out[2] = k * st * math.cos(phi) / q
        out[3] += k * ct * sp / q
    return out


def _meridian(R, G, y):
    theta, ptheta = y
    k = G / (8.0 * math.pi)
    return [ptheta / (R * R), k * math.sin(0.5 * theta) / math.cos(0.5 * theta)]


def _tau(R, G, y):
    r, alpha, zx, zy = y
    k = G / (8.0 * math.pi)
    f = r * math.exp(-1.0 / (r * r)) if r > 0.0 else 0.0
    s = math.sin(alpha)
    co = math.cos(alpha)
    c = 8.0 * R * R + f * f + 4.0 * R * f * s
    rho2 = c - 4.0 * R * R
    rho4 = rho2 * rho2
    c3 = c * c * c
    a = c * c / (16.0 * R * R * rho2)
    l = 8.0 * R * R / (c * c)
    x = f * co
    yy = f * s + 2.0 * R
    r2 = r * r
    gx = 8.0 * R * r2 * co * yy / c
    gy = 4.0 * R * r2 * (4.0 * R * s - f * (co * co - s * s)) / c
    pair = a * zx * co + zy * s
    w = 2.0 * r2 / (r2 + 2.0) * l * pair
    return [
        r * w,
        2.0 * l * (zy * co - a * zx * s),
        -f * (-x / rho4 * zx * zx - 32.0 * R * R * x / c3 * zy * zy) - k * gx + w * zx,
        -f * (-yy / rho4 * zx * zx - 32.0 * R * R * yy / c3 * zy * zy) - k * gy + w * zy,
    ]


def _collision(R, G, y):
    return [G / (4.0 * math.pi) * math.sin(y[1] - y[0]), 0.0]


def _eval(kind, R, G, y):
    try:
        if kind == PLANE:
            return _plane(R, G, y)
        if kind == MCGEHEE_TAU:
            return _tau(R, G, y)
        if kind == MERIDIAN:
            return _meridian(R, G, y)
        if kind == COLLISION:
            return _collision(R, G, y)
        return _sphere(R, G, y, kind)
    except (ZeroDivisionError, OverflowError, ValueError):
        return [math.nan] * len(y)


def rhs(kind, R, G, y):
    return np.array(_eval(kind, R, G, [float(v) for v in y]))


def dp45_step(kind, R, G, y, f0, h):
    """One Dormand-Prince step.  Returns (y5, err, f(y5)) with err = y5 - y4."""
    y = [float(v) for v in y]
    n = len(y)
    ks = [[float(v) for v in f0]]
    for i in range(1, 7):
        row = _A[i]
        yi = [y[j] + h * sum(row[m] * ks[m][j] for m in range(i)) for j in range(n)]
        ks.append(_eval(kind, R, G, yi))
    y5 = yi  # stage 7 is evaluated at the 5th-order solution (FSAL)
    err = [h * sum(_E[m] * ks[m][j] for m in range(7)) for j in range(n)]
    return np.array(y5), np.array(err), np.array(ks[6])


def rk4_step(kind, R, G, y, h):
    y = [float(v) for v in y]
    n = len(y)
    k1 = _eval(kind, R, G, y)
    k2 = _eval(kind, R, G, [y[j] + 0.5 * h * k1[j] for j in range(n)])
    k3 = _eval(kind, R, G, [y[j] + 0.5 * h * k2[j] for j in range(n)])
    k4 = _eval(kind, R, G, [y[j] + h * k3[j] for j in range(n)])
    return np.array([y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) for j in range(n)])


def rk4_run(kind, R, G, y0, h, n_steps):
    """n_steps fixed RK4 steps; the whole loop stays inside the kernel."""
    y = np.asarray(y0, dtype=float)
    for _ in range(int(n_steps)):
        y = rk4_step(kind, R, G, y, h)
    return y
