"""Errors raised by recbayes.

All errors derive from `ValueError`, so callers that only care about "bad input" can catch that.
"""


class ConfigError(ValueError):
    """Invalid configuration value or incompatible artifact for a configuration."""


class PlacementInfeasibleError(ValueError):
    """The grid has fewer free cells than entities to place."""


class InvalidTransitionError(ValueError):
    """A step was requested on a terminal state or with a malformed joint action."""


class MalformedRecordError(ValueError):
    """A packed observation record violates the 125-bit layout."""


class FormatError(ValueError):
    """Base class for binary file parse errors."""


class BadMagicError(FormatError):
    """File does not start with the expected magic bytes."""


class UnsupportedVersionError(FormatError):
    """File format version is not understood by this reader."""


class TruncatedFileError(FormatError):
    """File ended before all announced content was read."""


class StratificationError(ValueError):
    """A label has too few trajectories to populate every requested split."""


class IncompatibleCheckpointError(FormatError):
    """Checkpoint dimensions do not match the requested model."""


class NonFiniteLossError(ArithmeticError, ValueError):
    """Training produced a NaN or infinite loss."""


class EnumerationInfeasibleError(ValueError):
    """The reachable state space exceeds the enumeration cap."""


class DegenerateEvidenceError(ValueError):
    """Evidence has zero likelihood under every model."""


class ContractViolationError(ValueError):
    """A probability vector is not on the simplex."""


class UndefinedNormalizationError(ZeroDivisionError, ValueError):
    """Original and random anchor means coincide."""
