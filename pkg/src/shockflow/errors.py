"""Shared exception types."""


class ShockflowError(Exception):
    """Base class for package errors."""


class ConfigError(ShockflowError):
    """Invalid experiment configuration (bad key, value out of range)."""


class NumericalFailure(ShockflowError):
    """An iterative solver failed to converge or produced invalid values."""


class CertificationFailure(NumericalFailure):
    """Optimality of a candidate could not be certified.

    Carries the best iterate found and its distance to the certifying hull
    so the caller can diagnose the instance.
    """

    def __init__(self, message, best_point=None, hull_distance=None):
        super().__init__(message)
        self.best_point = best_point
        self.hull_distance = hull_distance
