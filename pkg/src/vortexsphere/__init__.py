"""Motion of a particle on a sphere under a point vortex potential."""
from .geometry import Params
from .kernels import BACKEND

__all__ = ["Params", "BACKEND"]
__version__ = "0.1.0"
