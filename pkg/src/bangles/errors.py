"""Exception types shared across the library."""


class BangleError(Exception):
    """Base class for all library errors."""


class ShapeMismatch(BangleError):
    pass


class SingularMatrix(BangleError):
    pass


class DivisionByZero(BangleError, ZeroDivisionError):
    pass


class LayoutMismatch(BangleError):
    pass


class SingularBlock(BangleError):
    pass


class SingularRegularPart(BangleError):
    pass


class NonConvergence(BangleError):
    """Floating-point rank decisions failed to settle; carries the tolerance used."""

    def __init__(self, message, eps=None):
        super().__init__(message)
        self.eps = eps


class IllConditioned(BangleError):
    pass


class SingularInput(BangleError):
    pass


class UnpairedEigenvalues(BangleError):
    pass


class NotZeroOne(BangleError):
    pass


class ParseError(BangleError):
    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column


class InvariantViolation(BangleError):
    pass
