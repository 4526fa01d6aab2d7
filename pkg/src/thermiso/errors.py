"""Exception hierarchy and process exit codes.

Every failure mode of the simulation pipeline maps onto one of a small
set of exception classes so that the command-line layer can translate
them into stable exit codes:

    0   success
    2   configuration / input validation problem
    3   numerical problem (singular system, quadrature failure, ...)
    4   constrained optimization found no feasible point
"""

from __future__ import annotations

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_INFEASIBLE = 4


class SimulationError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = EXIT_NUMERICAL


class ConfigError(SimulationError):
    """Invalid or inconsistent configuration input."""

    exit_code = EXIT_CONFIG


class SingularityError(SimulationError):
    """A formula was evaluated at a point where it diverges.

    Typical cause: a velocity class that is exactly resonant with one of
    the single-photon transitions, where the effective-model expressions
    (which divide by the shifted detunings) lose their validity.
    """


class NumericalError(SimulationError):
    """A linear solve or similar numeric step failed or is untrustworthy."""

    def __init__(self, message: str, condition_estimate: float | None = None):
        if condition_estimate is not None:
            message = f"{message} (condition estimate {condition_estimate:.3e})"
        super().__init__(message)
        self.condition_estimate = condition_estimate


class DegenerateSteadyStateError(NumericalError):
    """The steady state is not unique (Liouvillian null space dim > 1)."""

    def __init__(self, message: str, nullspace_dim: int | None = None):
        super().__init__(message)
        self.nullspace_dim = nullspace_dim


class QuadratureError(SimulationError):
    """Velocity integration did not reach the requested tolerance."""

    def __init__(self, message: str, achieved: float | None = None):
        if achieved is not None:
            message = f"{message} (achieved relative error estimate {achieved:.3e})"
        super().__init__(message)
        self.achieved = achieved


class InfeasibleError(SimulationError):
    """No point in the search box satisfies the optimization constraint."""

    exit_code = EXIT_INFEASIBLE

    def __init__(self, message: str, best_point: dict | None = None):
        super().__init__(message)
        self.best_point = best_point or {}
