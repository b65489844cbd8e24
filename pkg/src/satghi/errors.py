"""Exception types shared by the pipeline stages."""


class SatGhiError(Exception):
    """Base class for all errors raised by this package."""


class DataError(SatGhiError, ValueError):
    """Input data violates a contract (units, ordering, emptiness...)."""


class ParseError(DataError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)


class NumericalError(SatGhiError, ArithmeticError):
    """A numerical routine cannot produce a meaningful answer."""
