"""Exception hierarchy shared by the solver modules."""


class HbvmError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(HbvmError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class UnsupportedOperationError(HbvmError):
    """The operation needs data the object does not carry (e.g. a Hamiltonian)."""


class EvaluationError(HbvmError, ArithmeticError):
    """The vector field returned non-finite values."""


class StepFailure(HbvmError):
    """The stage fixed-point iteration did not converge.

    Attributes
    ----------
    residual : float
        Max-norm of the last fixed-point update.
    iterations : int
        Number of iterations performed.
    """

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class HorizonMismatchError(HbvmError, ValueError):
    """Two trajectories compared at their last point do not end together."""


class UndefinedOrderError(HbvmError, ValueError):
    """Order estimate requested from non-positive error values."""
