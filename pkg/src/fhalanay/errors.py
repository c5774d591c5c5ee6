"""Exception hierarchy shared by the analysis and simulation modules."""


class HalanayError(Exception):
    """Base class for all errors raised by fhalanay."""


class DomainError(HalanayError, ValueError):
    """An argument lies outside the domain of the operation."""


class InfeasibleError(HalanayError):
    """The stability criterion's hypotheses do not hold for the given parameters."""


class ConvergenceError(HalanayError):
    """A root bracket could not be established or refined."""


class CompatibilityError(HalanayError):
    """History functions violate the compatibility condition at t = 0."""


class MeshError(HalanayError, ValueError):
    """Time step is not commensurate with the delays, or the mesh is too large."""

    def __init__(self, message: str, suggested_dt: float | None = None):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class DivergenceError(HalanayError):
    """Simulated state norm exceeded the divergence guard."""


class ConfigError(HalanayError, ValueError):
    """A configuration file is missing, unreadable or malformed."""
