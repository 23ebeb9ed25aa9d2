"""Exception types. Verdicts are returned as data; these signal misuse or
numeric breakdown."""


class PermkitError(Exception):
    """Base class for all package errors."""


class SingularError(PermkitError, ArithmeticError):
    pass


class NoConvergenceError(PermkitError, ArithmeticError):
    pass


class ZeroDiagonalError(PermkitError, ValueError):
    pass


class NegativeScaleError(PermkitError, ValueError):
    pass


class DimensionError(PermkitError, ValueError):
    pass


class NotNormalizableError(PermkitError, ValueError):
    pass


class MixedSignsError(PermkitError, ValueError):
    pass


class NegativePairProductError(PermkitError, ValueError):
    pass


class NotSymmetricError(PermkitError, ValueError):
    pass


class ZeroDenominatorError(PermkitError, ZeroDivisionError):
    pass


class NonPositiveInputError(PermkitError, ValueError):
    pass


class PreconditionError(PermkitError, ValueError):
    pass


class NotMMatrixError(PermkitError, ValueError):
    pass


class DegreeTooLargeError(PermkitError, ValueError):
    pass


class NotClass1Error(PermkitError, ValueError):
    pass


class BadBetaError(PermkitError, ValueError):
    pass


class SignConstraintError(PermkitError, ValueError):
    pass


class ParseError(PermkitError, ValueError):
    pass
