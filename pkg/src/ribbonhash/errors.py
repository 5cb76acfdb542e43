"""Exception types shared across the library."""


class RibbonHashError(Exception):
    """Base class for all library errors."""


class InvalidImageError(RibbonHashError):
    """Image is degenerate, malformed, or unreadable."""


class ParameterError(RibbonHashError, ValueError):
    """A parameter violates its documented precondition."""


class EmptyGlcmError(ParameterError):
    """Image too small for the requested co-occurrence offset."""


class NumericalRankError(RibbonHashError):
    """Covariance matrices are numerically singular; retry with a positive ridge."""


class ComparisonError(RibbonHashError):
    """Hashes are not comparable (length, scheme, or key mismatch)."""


class ConfigError(RibbonHashError):
    """Configuration is inconsistent (missing model, digest mismatch, bad preset)."""


class EvaluationError(RibbonHashError):
    """Evaluation input is degenerate (e.g. an empty pair class)."""


class IncompatibleIndexError(RibbonHashError):
    """Hash index was built under a different config or key fingerprint."""
