"""Exception taxonomy and warning categories shared across the package."""


class ShockloopError(Exception):
    """Base class for all package-specific errors."""


# -- flux construction and root finding ------------------------------------

class FluxError(ShockloopError):
    pass


class NoRoot(FluxError):
    """The requested flux level is not attained on the working interval."""


class NotConverged(FluxError):
    """Root refinement failed to reach the requested tolerance."""


class InvalidFlux(FluxError):
    """A flux violates the convexity/normalization requirements."""


# -- grid states ------------------------------------------------------------

class StateError(ShockloopError):
    pass


class BadPosition(StateError):
    """A jump position falls outside the open domain."""


class OutOfRange(StateError):
    """Values would leave the certified working interval."""


class MeshTooCoarse(StateError):
    """The mesh does not resolve the observation window."""


class MeshMismatch(StateError):
    """Two grid states do not share a mesh."""


# -- time integration --------------------------------------------------------

class SolverError(ShockloopError):
    pass


class ZeroWaveSpeed(SolverError):
    """All wave speeds vanish so no CFL step size exists."""


class NonFinite(SolverError):
    """A cell average became NaN or infinite."""


# -- exact solutions ----------------------------------------------------------

class OracleError(ShockloopError):
    pass


class TooManyEvents(OracleError):
    """Front interaction count exceeded the safety cap."""


class OutOfRegion(OracleError):
    """Query point lies outside the computed space-time region."""


# -- stability diagnostics ----------------------------------------------------

class StabilityError(ShockloopError):
    pass


class InvalidRegime(StabilityError):
    """Parameter constants violate their sign/ordering requirements."""


class NoShock(StabilityError):
    """No midpoint crossing found in the profile."""


class WindowEmpty(StabilityError):
    """No samples fall inside the requested fit window."""


class NonPositiveSpeed(StabilityError):
    """Wave speed at the probe point is not positive."""


# -- delayed ODE ----------------------------------------------------------------

class DelayError(ShockloopError):
    pass


class BoundViolated(DelayError):
    """The a-priori amplitude bound was exceeded along a trajectory."""


class BadDelay(DelayError):
    """The delay left its declared bracket."""


class HypothesisFailed(DelayError):
    """A smallness hypothesis required by the contraction estimate fails."""


# -- configuration ------------------------------------------------------------

class ConfigError(ShockloopError):
    """Carries the full list of problems found in a config."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    pass


# -- warnings -------------------------------------------------------------------

class DegenerateJumpWarning(UserWarning):
    """Jump too small for a meaningful Rankine-Hugoniot quotient."""


class ParameterRegimeWarning(UserWarning):
    """Controller parameters fall outside the certified smallness regime."""
