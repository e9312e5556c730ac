"""Exception types shared across the package."""


class HypflowError(Exception):
    """Base class for all package-specific errors."""


class DomainError(HypflowError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation exactly at a pole (e.g. gcoth at zero distance)."""


class ConfigurationError(HypflowError, ValueError):
    """Invalid or contradictory grid/preset/run configuration."""


class SnapshotFormatError(HypflowError, ValueError):
    """A snapshot file violates the expected schema or its invariants."""


class NumericalFailure(HypflowError, RuntimeError):
    """Time stepping failed: blow-up, radius collapse or a lost bracket.

    Carries the simulation time at which the failure occurred, when known.
    """

    def __init__(self, message: str, time: float | None = None):
        if time is not None:
            message = f"{message} (at t={time:.9g})"
        super().__init__(message)
        self.time = time
