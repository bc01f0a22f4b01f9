"""Custom exceptions for the compete-sim package."""

from typing import List, Optional


class CompeteSimError(Exception):
    """Base exception for all compete-sim errors."""
    pass


class ValidationError(CompeteSimError):
    """Raised when a combination of inputs fails validation."""
    pass


class ConfigError(CompeteSimError):
    """Raised when a settings file cannot be read or is invalid."""
    pass


class DegenerateParametersError(CompeteSimError):
    """Raised when s1*s2 = 1 and the interior equilibrium is undefined.

    The boundary equilibria are still attached so callers can use them.
    """

    def __init__(self, message: str, boundary: Optional[List] = None):
        super().__init__(message)
        self.boundary = boundary or []


class IntegrationError(CompeteSimError):
    """Base class for failures while stepping the ODE system."""
    pass


class StepBudgetExceededError(IntegrationError):
    """Raised when t_end / h exceeds the configured step budget."""
    pass


class NonFiniteStateError(IntegrationError):
    """Raised when a state component becomes NaN or infinite."""

    def __init__(self, step: int, t: float):
        super().__init__(f"Non-finite state at step {step} (t={t:g})")
        self.step = step
        self.t = t


class IndistinguishablePrecisionError(IntegrationError):
    """Raised when successive refinements differ by less than double precision noise."""
    pass


class ScenarioError(CompeteSimError):
    """Base class for scenario lookup and batch errors."""
    pass


class UnknownScenarioError(ScenarioError):
    """Raised when a builtin scenario name is not recognised."""
    pass


class DuplicateScenarioError(ScenarioError):
    """Raised when a comparison batch contains the same name twice."""
    pass


class ScenarioRunError(ScenarioError):
    """Raised when a scenario inside a batch fails; names the offender."""

    def __init__(self, name: str, cause: Exception):
        super().__init__(f"Scenario '{name}' failed: {cause}")
        self.name = name
        self.cause = cause


class ScenarioFileError(CompeteSimError):
    """Raised when a scenario file cannot be parsed."""
    pass


class OutputError(CompeteSimError):
    """Raised when an output file cannot be written."""
    pass
