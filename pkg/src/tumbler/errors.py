"""Exception hierarchy shared by every module."""


class TumblerError(Exception):
    """Base class for all domain errors raised by this package."""


class NoRepresentation(TumblerError):
    pass


class SeedTooLarge(TumblerError):
    pass


class CountTooSmall(TumblerError):
    pass


class InvalidDecomposition(TumblerError):
    pass


class BadSize(TumblerError):
    pass


class SizeMismatch(TumblerError):
    pass


class InsufficientUniqueValues(TumblerError):
    pass


class BadMagic(TumblerError):
    pass


class BadLength(TumblerError):
    pass


class TrailingBits(TumblerError):
    pass


class DuplicateTumbler(TumblerError):
    pass


class EmptyResult(TumblerError):
    pass


class BadInitVector(TumblerError):
    pass


class GenerationAborted(TumblerError):
    """A loop iteration failed; ``iteration`` is 0 for the Constant Bit Mask."""

    def __init__(self, iteration, cause):
        self.iteration = iteration
        self.cause = cause
        super().__init__(f"iteration {iteration}: {type(cause).__name__}: {cause}")


class TooLarge(TumblerError):
    pass


class NoSolution(TumblerError):
    pass


class NoCycleFound(TumblerError):
    def __init__(self, message, iterations=0):
        self.iterations = iterations
        super().__init__(message)


class TooShort(TumblerError):
    pass
