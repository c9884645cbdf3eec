# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled stepping kernels; mirrors ``_kernels_py`` exactly."""
from libc.math cimport sin, cos, exp, NAN, M_PI

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef enum:
    K_PLANE = 0
    K_SPHERE_NORTH = 1
    K_SPHERE_EQUATOR = 2
    K_SPHERE_GEODESIC = 3
    K_MERIDIAN = 4
    K_MCGEHEE_TAU = 5
    K_COLLISION = 6

PLANE = K_PLANE
SPHERE_NORTH = K_SPHERE_NORTH
SPHERE_EQUATOR = K_SPHERE_EQUATOR
SPHERE_GEODESIC = K_SPHERE_GEODESIC
MERIDIAN = K_MERIDIAN
MCGEHEE_TAU = K_MCGEHEE_TAU
COLLISION = K_COLLISION

DIMS = (4, 4, 4, 4, 2, 4, 2)

BACKEND = "cython"

cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40


cdef inline void _fill_nan(double* out, int n) noexcept nogil:
    cdef int i
    for i in range(n):
        out[i] = NAN


cdef void _plane(double R, double G, const double* y, double* out) noexcept nogil:
    cdef double x = y[0], yy = y[1], px = y[2], py = y[3]
    cdef double k = G / (8.0 * M_PI)
    cdef double rho2 = x * x + yy * yy
    cdef double D = 4.0 * R * R + rho2
    cdef double N = x * x + (yy - 2.0 * R) * (yy - 2.0 * R)
    if rho2 == 0.0 or N == 0.0:
        _fill_nan(out, 4)
        return
    cdef double rho4 = rho2 * rho2
    cdef double D3 = D * D * D
    cdef double l = 8.0 * R * R / (D * D)
    cdef double al = 1.0 / (2.0 * rho2)
    cdef double lbx = 8.0 * R * x * yy / (D * N)
    cdef double lby = 4.0 * R * (yy * yy - x * x - 4.0 * R * R) / (D * N)
    out[0] = 2.0 * al * px
    out[1] = 2.0 * l * py
    out[2] = -(-x / rho4 * px * px - 32.0 * R * R * x / D3 * py * py + k * lbx)
    out[3] = -(-yy / rho4 * px * px - 32.0 * R * R * yy / D3 * py * py + k * lby)


cdef void _sphere(double R, double G, const double* y, double* out, int mode) noexcept nogil:
    cdef double phi = y[0], theta = y[1], pphi = y[2], ptheta = y[3]
    cdef double st = sin(theta), ct = cos(theta)
    cdef double R2 = R * R
    cdef double k = G / (8.0 * M_PI)
    cdef double cf, sp, q, ch
    if st == 0.0:
        _fill_nan(out, 4)
        return
    cf = 0.0 if pphi == 0.0 else ct / (R2 * st * st * st) * pphi * pphi
    out[0] = pphi / (R2 * st * st)
    out[1] = ptheta / R2
    out[2] = 0.0
    out[3] = cf
    if mode == K_SPHERE_NORTH:
        ch = cos(0.5 * theta)
        if ch == 0.0:
            _fill_nan(out, 4)
            return
        out[3] += k * sin(0.5 * theta) / ch
    elif mode == K_SPHERE_EQUATOR:
        sp = sin(phi)
        q = 1.0 - st * sp
        if q == 0.0:
            _fill_nan(out, 4)
            return
        out[2] = k * st * cos(phi) / q
        out[3] += k * ct * sp / q


cdef void _meridian(double R, double G, const double* y, double* out) noexcept nogil:
    cdef double k = G / (8.0 * M_PI)
    cdef double ch = cos(0.5 * y[0])
    if ch == 0.0:
        _fill_nan(out, 2)
        return
    out[0] = y[1] / (R * R)
    out[1] = k * sin(0.5 * y[0]) / ch


cdef void _tau(double R, double G, const double* y, double* out) noexcept nogil:
    cdef double r = y[0], alpha = y[1], zx = y[2], zy = y[3]
    cdef double k = G / (8.0 * M_PI)
    cdef double f = r * exp(-1.0 / (r * r)) if r > 0.0 else 0.0
    cdef double s = sin(alpha), co = cos(alpha)
    cdef double c = 8.0 * R * R + f * f + 4.0 * R * f * s
    cdef double rho2 = c - 4.0 * R * R
    if rho2 <= 0.0:
        _fill_nan(out, 4)
        return
    cdef double rho4 = rho2 * rho2
    cdef double c3 = c * c * c
    cdef double a = c * c / (16.0 * R * R * rho2)
    cdef double l = 8.0 * R * R / (c * c)
    cdef double x = f * co
    cdef double yy = f * s + 2.0 * R
    cdef double r2 = r * r
    cdef double gx = 8.0 * R * r2 * co * yy / c
    cdef double gy = 4.0 * R * r2 * (4.0 * R * s - f * (co * co - s * s)) / c
    cdef double pair = a * zx * co + zy * s
    cdef double w = 2.0 * r2 / (r2 + 2.0) * l * pair
    out[0] = r * w
    out[1] = 2.0 * l * (zy * co - a * zx * s)
    out[2] = -f * (-x / rho4 * zx * zx - 32.0 * R * R * x / c3 * zy * zy) - k * gx + w * zx
    out[3] = -f * (-yy / rho4 * zx * zx - 32.0 * R * R * yy / c3 * zy * zy) - k * gy + w * zy


cdef void _collision(double R, double G, const double* y, double* out) noexcept nogil:
    out[0] = G / (4.0 * M_PI) * sin(y[1] - y[0])
    out[1] = 0.0


cdef void _eval(int kind, double R, double G, const double* y, double* out) noexcept nogil:
    if kind == K_PLANE:
        _plane(R, G, y, out)
    elif kind == K_MCGEHEE_TAU:
        _tau(R, G, y, out)
    elif kind == K_MERIDIAN:
        _meridian(R, G, y, out)
    elif kind == K_COLLISION:
        _collision(R, G, y, out)
    else:
        _sphere(R, G, y, out, kind)


def rhs(int kind, double R, double G, y):
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    out = np.empty(yv.shape[0])
    cdef double[::1] ov = out
    _eval(kind, R, G, &yv[0], &ov[0])
    return out


cdef void _dp45(int kind, double R, double G, const double* y, const double* f0, double h, int n,
                double* y5, double* err, double* f7, double* work) noexcept nogil:
    # work holds stages k2..k6 and one temporary state: 6 * n doubles
    cdef double* k2 = work
    cdef double* k3 = work + n
    cdef double* k4 = work + 2 * n
    cdef double* k5 = work + 3 * n
    cdef double* k6 = work + 4 * n
    cdef double* yt = work + 5 * n
    cdef int j
    for j in range(n):
        yt[j] = y[j] + h * (A21 * f0[j])
    _eval(kind, R, G, yt, k2)
    for j in range(n):
        yt[j] = y[j] + h * (A31 * f0[j] + A32 * k2[j])
    _eval(kind, R, G, yt, k3)
    for j in range(n):
        yt[j] = y[j] + h * (A41 * f0[j] + A42 * k2[j] + A43 * k3[j])
    _eval(kind, R, G, yt, k4)
    for j in range(n):
        yt[j] = y[j] + h * (A51 * f0[j] + A52 * k2[j] + A53 * k3[j] + A54 * k4[j])
    _eval(kind, R, G, yt, k5)
    for j in range(n):
        yt[j] = y[j] + h * (A61 * f0[j] + A62 * k2[j] + A63 * k3[j] + A64 * k4[j] + A65 * k5[j])
    _eval(kind, R, G, yt, k6)
    for j in range(n):
        y5[j] = y[j] + h * (B1 * f0[j] + B3 * k3[j] + B4 * k4[j] + B5 * k5[j] + B6 * k6[j])
    _eval(kind, R, G, y5, f7)
    for j in range(n):
        err[j] = h * (E1 * f0[j] + E3 * k3[j] + E4 * k4[j] + E5 * k5[j] + E6 * k6[j] + E7 * f7[j])


def dp45_step(int kind, double R, double G, y, f0, double h):
    """One Dormand-Prince step.  Returns (y5, err, f(y5)) with err = y5 - y4."""
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] fv = np.ascontiguousarray(f0, dtype=np.float64)
    cdef int n = yv.shape[0]
    y5 = np.empty(n)
    err = np.empty(n)
    f7 = np.empty(n)
    cdef double[::1] y5v = y5, ev = err, f7v = f7
    cdef double work[24]
    _dp45(kind, R, G, &yv[0], &fv[0], h, n, &y5v[0], &ev[0], &f7v[0], work)
    return y5, err, f7


cdef void _rk4(int kind, double R, double G, double* y, double h, int n, double* work) noexcept nogil:
    cdef double* k1 = work
    cdef double* k2 = work + n
    cdef double* k3 = work + 2 * n
    cdef double* k4 = work + 3 * n
    cdef double* yt = work + 4 * n
    cdef int j
    _eval(kind, R, G, y, k1)
    for j in range(n):
        yt[j] = y[j] + 0.5 * h * k1[j]
    _eval(kind, R, G, yt, k2)
    for j in range(n):
        yt[j] = y[j] + 0.5 * h * k2[j]
    _eval(kind, R, G, yt, k3)
    for j in range(n):
        yt[j] = y[j] + h * k3[j]
    _eval(kind, R, G, yt, k4)
    for j in range(n):
        y[j] = y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])


def rk4_step(int kind, double R, double G, y, double h):
    out = np.array(y, dtype=np.float64, copy=True)
    cdef double[::1] ov = out
    cdef double work[20]
    _rk4(kind, R, G, &ov[0], h, ov.shape[0], work)
    return out


def rk4_run(int kind, double R, double G, y0, double h, long n_steps):
    """n_steps fixed RK4 steps; the whole loop stays inside the kernel."""
    out = np.array(y0, dtype=np.float64, copy=True)
    cdef double[::1] ov = out
    cdef double work[20]
    cdef long i
    cdef int n = ov.shape[0]
    with nogil:
        for i in range(n_steps):
            _rk4(kind, R, G, &ov[0], h, n, work)
    return out
