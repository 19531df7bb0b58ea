"""Exception hierarchy shared by every module in the package."""


class StacoolError(Exception):
    """Base class for all package errors."""


class ConfigError(StacoolError, ValueError):
    """Invalid or inconsistent configuration.

    ``violations`` holds one message per failed check so callers can
    report all of them at once.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DomainError(StacoolError, ValueError):
    """Argument outside the domain where a quantity is defined."""


class SingularityError(StacoolError, ArithmeticError):
    """A quantity is singular at the requested point (e.g. g0 = 0)."""


class IntegrationError(StacoolError, RuntimeError):
    """The ODE integration failed."""

    def __init__(self, message, t=None):
        self.t = t
        if t is not None:
            message = f"{message} (t = {t:.6g})"
        super().__init__(message)


class StiffnessError(IntegrationError):
    """Step size fell below the minimum allowed value."""


class AccuracyError(IntegrationError):
    """The requested tolerance could not be met within the step budget."""


class TruncationError(StacoolError, RuntimeError):
    """Fock-space truncation leaked population into the top level."""


class DifferentiationError(StacoolError, ArithmeticError):
    """A derivative evaluated to a non-finite value."""
