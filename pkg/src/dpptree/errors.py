"""Semantic exception hierarchy shared across the package."""


class DppTreeError(Exception):
    """Base class for all library errors."""


class ValidationError(DppTreeError):
    """An input violates a documented precondition or invariant."""


class SpectrumError(ValidationError):
    """A kernel's spectrum leaves the admissible band.

    Carries the offending eigenvalue so callers can report the leakage.
    """

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class QuadratureToleranceError(DppTreeError):
    """Quadrature and closed-form evaluations disagree beyond tolerance."""

    def __init__(self, message, deviation=None):
        super().__init__(message)
        self.deviation = deviation


class ResolutionError(ValidationError):
    """A grid or mesh is too coarse for the requested operation."""


class DistributionError(DppTreeError):
    """A computed probability vector is inconsistent (negative mass etc.)."""
