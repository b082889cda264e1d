"""Exception types raised across the package."""


class FermiPoissonError(Exception):
    """Base class for all package errors."""


class ShapeError(FermiPoissonError, ValueError):
    """Operand shapes are incompatible with the requested operation."""


class SizeLimitError(FermiPoissonError, MemoryError):
    """A dense object would exceed the configured size cap."""


class ConstraintError(FermiPoissonError, ValueError):
    """A quadratic generator or rate violates its admissibility constraints."""


class StateValidationError(FermiPoissonError, ValueError):
    """A density matrix is not Hermitian, unit-trace and positive."""


class OrderingError(FermiPoissonError, ValueError):
    """Time points are negative or not in nondecreasing order."""


class NumericalFailureError(FermiPoissonError, ArithmeticError):
    """A computed state lost physicality beyond roundoff."""


class ScenarioError(FermiPoissonError, ValueError):
    """A scenario file does not match the schema.

    ``path`` names the offending field, e.g. ``channels[1].rate``.
    """

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
