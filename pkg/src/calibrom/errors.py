"""Exception types shared across the package."""


class CalibromError(Exception):
    """Base class for all calibrom errors."""


class ConfigurationError(CalibromError, ValueError):
    """Invalid or inconsistent configuration values."""


class ResolutionError(CalibromError, ValueError):
    """Voxel resolution too coarse to represent the requested geometry."""


class ConvergenceError(CalibromError, RuntimeError):
    """An iterative solver ran out of iterations."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class NumericalError(CalibromError, RuntimeError):
    """A numerical routine failed to reach its stated accuracy."""


class DivergenceError(CalibromError, RuntimeError):
    """Training produced a non-finite loss."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class BundleFormatError(CalibromError, ValueError):
    """Malformed, truncated or incompatible binary artifact."""
