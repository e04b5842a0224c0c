"""Exception hierarchy.

Every error raised for bad input data derives from :class:`FlatMeansError`,
which the CLI maps to exit status 2.
"""


class FlatMeansError(ValueError):
    pass


class NegativeWeight(FlatMeansError):
    pass


class SumNotOne(FlatMeansError):
    pass


class AllZero(FlatMeansError):
    pass


class DimensionMismatch(FlatMeansError):
    pass


class NotOrthonormal(FlatMeansError):
    pass


class NonFiniteValue(FlatMeansError):
    pass


class EmptySet(FlatMeansError):
    pass


class DimensionTooLarge(FlatMeansError):
    pass


class NotSymmetric(FlatMeansError):
    pass


class NoConvergence(FlatMeansError):
    pass


class KTooLarge(FlatMeansError):
    pass


class InvalidConfig(FlatMeansError):
    pass


class TooFewFlats(FlatMeansError):
    pass


class InvalidGrid(FlatMeansError):
    pass


class EmptyImage(FlatMeansError):
    pass


class SizeMismatch(FlatMeansError):
    pass


class MalformedModel(FlatMeansError):
    pass


class ParseError(FlatMeansError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class RaggedRows(ParseError):
    pass


class EmptyFile(FlatMeansError):
    pass


class UnsupportedFormat(FlatMeansError):
    pass


class MalformedHeader(FlatMeansError):
    pass


class ConsistencyError(RuntimeError):
    """A computed quantity violated a mathematical guarantee beyond rounding."""
