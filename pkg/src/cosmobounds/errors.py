"""Exception hierarchy shared by every module."""


class CosmoBoundsError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CosmoBoundsError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class DegenerateMetricError(CosmoBoundsError, ValueError):
    """A scale factor or warping function is not strictly positive."""


class ValidationError(CosmoBoundsError, ValueError):
    """Input data is malformed or violates a data-consistency invariant."""


class HypothesisError(CosmoBoundsError):
    """A comparison was requested without its curvature hypothesis."""
