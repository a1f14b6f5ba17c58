"""Exception hierarchy.

Every error carries a short machine-readable ``code`` (the class name) so the
command-line front end can report failures on a single parseable line.
"""


class PreLambdaError(ValueError):
    """Base class for all errors raised by this package."""

    @property
    def code(self) -> str:
        return type(self).__name__


class ZeroTotal(PreLambdaError):
    pass


class NegativeCount(PreLambdaError):
    pass


class NegativeEntry(PreLambdaError):
    pass


class NonFiniteEntry(PreLambdaError):
    pass


class NotNormalized(PreLambdaError):
    pass


class TooFewCategories(PreLambdaError):
    pass


class BadOrder(PreLambdaError):
    """Order t outside ``1 <= t < c``."""


class DegenerateMarginal(PreLambdaError):
    """The top-t marginal probabilities sum to 1, so the error without a predictor is 0."""


class DegenerateRMS(PreLambdaError):
    pass


class BadAlpha(PreLambdaError):
    pass


class DomainError(PreLambdaError):
    pass


class BadRectangle(PreLambdaError):
    pass


class ParseError(PreLambdaError):
    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + loc)
        self.line = line
        self.column = column


class NotRectangular(PreLambdaError):
    pass
