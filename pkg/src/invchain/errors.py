"""Exception hierarchy shared by every layer of the package."""


class InvchainError(Exception):
    """Base class for all errors raised by invchain."""


class InvalidIndexError(InvchainError, ValueError):
    pass


class InvalidInputError(InvchainError, ValueError):
    pass


class DomainMismatchError(InvchainError, ValueError):
    """Operands live in different rings (characteristic or truncation differ)."""


class IncompleteSubstitutionError(InvchainError, KeyError):
    pass


class DivisionByZeroError(InvchainError, ZeroDivisionError):
    pass


class NonUnitError(InvchainError, ArithmeticError):
    pass


class CannotExtendError(InvchainError, ValueError):
    pass


class InsufficientTruncationError(InvchainError, ValueError):
    pass


class ShapeError(InvchainError, ValueError):
    pass


class SingularMatrixError(InvchainError, ArithmeticError):
    pass


class BudgetError(InvchainError, RuntimeError):
    pass


class InternalInvariantError(InvchainError, AssertionError):
    pass


class ConfigError(InvchainError, ValueError):
    pass


class ParseError(InvchainError, ValueError):
    pass
