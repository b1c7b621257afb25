"""Exception types shared across the package."""


class IncratioError(Exception):
    """Base class for all package-specific errors."""


class UnboundedDemandError(IncratioError):
    """The consumer problem has no optimum (a desired commodity is free)."""


class DemandUndefinedError(IncratioError):
    """Demand cannot be evaluated (e.g. zero Leontief denominator)."""


class MultiValuedDemandError(IncratioError):
    """An operation requiring single-valued demand hit a correspondence."""


class AssumptionViolationError(IncratioError):
    """Positivity / strong-competitiveness preconditions do not hold."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class DegenerateMarketError(IncratioError):
    """Numerically or structurally degenerate market (e.g. mixed-sign
    adjugate row, zero truthful utility)."""


class SolverError(IncratioError):
    """A price search failed to reach the clearing tolerance."""

    def __init__(self, message, best_residual=None):
        self.best_residual = best_residual
        super().__init__(message)


class BoundViolationError(IncratioError):
    """An asserted theoretical bound was exceeded by a computed ratio."""
