"""Exception hierarchy shared by all modules."""


class StabilityLabError(Exception):
    """Base class."""


class DomainError(StabilityLabError, ValueError):
    """Radius outside the metric's domain."""


class DegenerateMetricError(StabilityLabError, ArithmeticError):
    """Warping function numerically zero where a positive value is needed."""


class PreconditionError(StabilityLabError, ValueError):
    """Parameters violate a stated hypothesis (message names the condition)."""


class IntegrationError(StabilityLabError, ArithmeticError):
    """Quadrature or ODE integration failed to converge."""

    def __init__(self, message, estimate=None, error=None, last_radius=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.last_radius = last_radius


class FitUndefinedError(StabilityLabError, ValueError):
    """Area-growth fit impossible (bounded domain or non-finite areas)."""


class DegenerateNormalizationError(StabilityLabError, ArithmeticError):
    """Asymptotic normalization factor vanishes."""
