"""Exception types shared across the package."""


class SitddeError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(SitddeError, ValueError):
    """Non-finite or otherwise unusable input."""


class DegenerateParametersError(SitddeError):
    """Parameter combination for which a closed form is undefined (e.g. xi1 == xi3)."""


class ComplexBranchError(SitddeError):
    """The equilibrium discriminant is negative; the closed form leaves the reals."""


class SingularDenominatorError(SitddeError):
    """The crossing trig denominator vanishes at the requested frequency."""


class InconsistentCrossingError(SitddeError):
    """cos^2 + sin^2 deviates from 1 beyond tolerance at a candidate crossing."""


class DegenerateCrossingError(SitddeError):
    """Transversality denominator rho1^2 + rho2^2 is zero."""


class InvalidStepError(SitddeError, ValueError):
    """Integration step incompatible with the delay (h > tau)."""


class OutOfSpanError(SitddeError, ValueError):
    """Requested evaluation time lies outside the integrated span."""


class BoundaryAbsentError(SitddeError):
    """The boundary equilibrium does not exist (requires r > xi3)."""


class BlowUpError(SitddeError):
    """Integration produced a non-finite state.

    Carries the time of failure and the partial trajectory computed so far.
    """

    def __init__(self, time: float, trajectory=None):
        super().__init__(f"state became non-finite at t = {time:.6g}")
        self.time = time
        self.trajectory = trajectory
