"""Exception types raised at chart singularities and invalid inputs."""


class VortexSphereError(Exception):
    """Base class for every error raised by the package."""


class DomainError(VortexSphereError, ValueError):
    """Argument outside the domain of a function."""


class NorthPole(DomainError):
    """Stereographic projection requested at the projection pole z = 2R."""


class OffSphere(DomainError):
    """Point does not lie on the requested sphere."""


class OriginSingular(DomainError):
    """Plane origin (image of the south pole), where a and a*l blow up."""


class AtVortex(DomainError):
    """State sits on the vortex, where the potential is singular."""


class PoleSingular(DomainError):
    """Angular sphere chart evaluated at theta in {0, pi}."""


class CollisionState(DomainError):
    """McGehee state on the collision manifold r = 0 has no plane preimage."""


class OffShell(DomainError):
    """State violates the energy relation a*z_x**2 + z_y**2 = E_hat."""


class ZeroVelocity(DomainError):
    """E_hat vanishes, so the angle psi is undefined."""


class ForbiddenRegion(DomainError):
    """E_hat < 0: configuration not reachable at this energy."""


class NoOrbit(VortexSphereError):
    """No vortex-parallel periodic orbit exists at the requested colatitude."""


class DegenerateStart(DomainError):
    """Heteroclinic start placed exactly on a rest point."""


class NotColliding(VortexSphereError):
    """Trajectory does not end in a collision event."""


class NonzeroAngularMomentum(VortexSphereError):
    """Collision transmission requested for an orbit with l != 0."""


class StepFailure(VortexSphereError):
    """Adaptive step size underflowed."""
