"""Exception types raised across the package."""


class QdqError(Exception):
    """Base class for all package errors."""


class NonSquare(QdqError, ValueError):
    pass


class DimensionMismatch(QdqError, ValueError):
    pass


class Singular(QdqError, ArithmeticError):
    pass


class SingularSet(Singular):
    """The dequantizers are linearly dependent, so no dual set exists."""


class DegenerateTransform(Singular):
    pass


class CertificationFailed(QdqError):
    pass


class InfeasibleParams(QdqError, ValueError):
    """Family parameters violate a feasibility constraint.

    ``field`` names the offending parameter (or constraint) for the CLI's
    machine-readable error line.
    """

    def __init__(self, message: str, field: str = "params"):
        super().__init__(message)
        self.field = field


class NoRealSolution(InfeasibleParams):
    pass


class UnknownPreset(QdqError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown preset"


class NotOrthonormalBase(QdqError, ValueError):
    pass
