"""Exception and warning types raised across the package."""


class ConfigurationError(ValueError):
    """Invalid physical or numerical parameters (mass, frequency, step)."""


class DomainError(ValueError):
    """Argument outside the domain of a function, e.g. theta outside [0, 1]."""


class SingularEliminationError(ArithmeticError):
    """The internal-node elimination divides by ``1 - (omega*h)**2 / 8 == 0``."""


class StabilityWindowError(ValueError):
    """A Simpson run was requested with ``omega*h`` outside ``(0, 2*sqrt(2))``."""


class NotSymplecticError(ValueError):
    """A propagator whose determinant is not 1."""


class UnsupportedFormError(ValueError):
    """A propagator with unequal diagonal entries."""


class SingularJacobianError(ArithmeticError):
    """Newton iteration hit a zero or non-finite derivative."""


class ConvergenceError(RuntimeError):
    """Newton iteration ran out of iterations.

    Attributes:
        iterate: Last iterate reached.
        residual: Residual at ``iterate``.
    """

    def __init__(self, message: str, iterate: float, residual: float):
        super().__init__(message)
        self.iterate = iterate
        self.residual = residual


class StabilityWarning(RuntimeWarning):
    """A propagator was built outside its stability window."""
