"""Exception hierarchy shared by every module."""


class SuperKvNError(Exception):
    """Base class for all library errors."""


class AlgebraMismatch(SuperKvNError, ValueError):
    """Operands live in different Grassmann algebras."""


class UnknownGenerator(SuperKvNError, KeyError):
    pass


class NoInverse(SuperKvNError, ZeroDivisionError):
    """A supernumber with zero body has no multiplicative inverse."""


class NotNilpotent(SuperKvNError, ValueError):
    """Exponential requested of an element whose body the ring cannot exponentiate."""


class SingularOddBlock(SuperKvNError, ZeroDivisionError):
    """The odd-odd block of a supermatrix has a singular body."""


class DimensionMismatch(SuperKvNError, ValueError):
    pass


class IntegrationFailure(SuperKvNError, RuntimeError):
    """Adaptive step size fell below the representable minimum."""


class SupportEscape(SuperKvNError, RuntimeError):
    """A characteristic left the grid while carrying non-negligible amplitude."""


class CausticError(SuperKvNError, ArithmeticError):
    """Fluctuation determinant vanished (or changed sign) at the reported time."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class NoSolutionBranch(SuperKvNError, ValueError):
    """Neither constraint-solution branch applies to the supplied bodies."""


class RegulatorRequired(SuperKvNError, ValueError):
    """The quantum vierbein family needs a nonzero regulator."""
