"""Exception types shared across the package."""


class ScatteringError(Exception):
    """Base class for all errors raised by disk_scattering."""


class InvariantError(ScatteringError, ValueError):
    """An input violates a group or flux constraint (det M = 1, |r|^2 + |t|^2 = 1, ...)."""


class NotHyperbolicError(InvariantError):
    """The operation needs a hyperbolic action, i.e. (Tr M)^2 > 4."""


class DegenerateError(ScatteringError, ArithmeticError):
    """A quantity that must be nonzero vanished numerically."""


class PerfectReflectionError(DegenerateError):
    """The composite system reflects everything, so it has no transfer matrix."""


class BoundaryPointError(InvariantError):
    """A point on the unit circle was given where an interior point is required.

    The hyperbolic distance to a boundary point is infinite.
    """


class OracleToleranceError(DegenerateError):
    """The numerical integration missed its determinant tolerance (grid too coarse)."""

    def __init__(self, message: str, det_residual: float):
        super().__init__(message)
        self.det_residual = det_residual
