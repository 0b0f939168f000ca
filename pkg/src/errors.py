"""
errors.py - Exception Hierarchy

Every failure raised by the geometry, analysis and solver modules derives from
IsoconeError, so callers (the CLI in particular) can map error families to exit
codes without inspecting messages.

    IsoconeError
    ├── DimensionMismatchError   operands of incompatible dimension
    ├── InvalidInputError        type invariant violated (zero normal, loop, ...)
    ├── ExactGeometryCapError    exact enumerative path unavailable at this size
    └── NumericalError           numerical failure of an algorithm
        ├── ConvergenceError         iteration budget exhausted
        └── DegenerateProjectionError  no certified KKT point / conflicting ones
"""


class IsoconeError(Exception):
    """Base class for all errors raised by this code base."""


class DimensionMismatchError(IsoconeError, ValueError):
    """Raised when vectors, cones, weights or graphs have incompatible sizes."""


class InvalidInputError(IsoconeError, ValueError):
    """Raised when an input violates a type invariant."""


class ExactGeometryCapError(IsoconeError, ValueError):
    """
    Raised when an exact (enumerative) routine is asked to work above its cap.

    Args:
        message: Human-readable description
        dim: Offending dimension (or half-space count)
        cap: Configured cap that was exceeded
    """

    def __init__(self, message, dim=None, cap=None):
        super().__init__(message)
        self.dim = dim
        self.cap = cap


class NumericalError(IsoconeError, RuntimeError):
    """Raised when a numerical routine cannot produce a certified answer."""


class ConvergenceError(NumericalError):
    """
    Raised when an iterative solver exhausts its iteration budget.

    Carries the best iterate so callers can still inspect it.

    Args:
        message: Human-readable description
        best_point: Last iterate (numpy array)
        residual: Max scaled constraint violation of best_point
        iterations: Number of cycles performed
    """

    def __init__(self, message, best_point=None, residual=None, iterations=None):
        super().__init__(message)
        self.best_point = best_point
        self.residual = residual
        self.iterations = iterations


class DegenerateProjectionError(NumericalError):
    """
    Raised when the exact projection cannot certify a unique KKT point.

    Args:
        message: Human-readable description
        candidate: Best ProjectionResult found (diagnostic flag set), or None
    """

    def __init__(self, message, candidate=None):
        super().__init__(message)
        self.candidate = candidate
