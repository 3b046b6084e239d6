"""Exception hierarchy shared by the library and the CLI."""


class BratteliError(Exception):
    """Base class for all errors raised by this package."""


class InputError(BratteliError, ValueError):
    """Malformed user input: diagram files, measure files, element text."""


class LevelOutOfRange(BratteliError, IndexError):
    """A level beyond the stored prefix of a truncated diagram was requested."""


class CapExceeded(BratteliError):
    """An enumeration or brute-force bound was hit."""


class DepthExceeded(BratteliError):
    """A measure or trace is not deep enough for the requested level."""


class ConvergenceError(BratteliError):
    """An iterative numerical routine failed to reach its tolerance."""


class HypothesisViolation(BratteliError):
    """The standing hypothesis of an identity check does not hold."""
