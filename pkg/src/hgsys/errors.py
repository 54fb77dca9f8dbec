"""Exception types shared across the package."""


class HGSError(Exception):
    pass


class PoleError(HGSError, ArithmeticError):
    """A scalar has no value at the requested point."""


class ParseError(HGSError, ValueError):
    pass


class ValidationError(HGSError, ValueError):
    pass


class OrientationError(HGSError):
    """A relation has no unique leading word under the chosen precedence."""


class BudgetExceeded(HGSError):
    pass


class InconclusiveError(HGSError):
    pass


class SignatureMismatch(HGSError, TypeError):
    pass


class CocycleError(ValidationError):
    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple
