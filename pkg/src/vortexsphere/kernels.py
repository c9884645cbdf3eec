"""Backend selection for the stepping kernels.

The compiled ``_kernels`` extension is used when it was built; otherwise the
pure-Python ``_kernels_py`` twin is loaded.  Set ``VORTEXSPHERE_PURE=1`` to
force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("VORTEXSPHERE_PURE", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND

KINDS = {
    "plane": _kernels_py.PLANE,
    "sphere-north": _kernels_py.SPHERE_NORTH,
    "sphere-equator": _kernels_py.SPHERE_EQUATOR,
    "sphere-geodesic": _kernels_py.SPHERE_GEODESIC,
    "meridian": _kernels_py.MERIDIAN,
    "mcgehee-tau": _kernels_py.MCGEHEE_TAU,
    "collision": _kernels_py.COLLISION,
}

rhs = _impl.rhs
dp45_step = _impl.dp45_step
rk4_step = _impl.rk4_step
rk4_run = _impl.rk4_run


def backend(name: str):
    """Kernel module by name: ``"python"`` or ``"cython"`` (ImportError if unbuilt)."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")
