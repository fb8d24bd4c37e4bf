"""Semantic exception types shared across the package."""


class GredError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GredError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConstraintError(GredError, ValueError):
    """A parameter combination violates a model feasibility constraint."""


class ConfigError(GredError, ValueError):
    """A configuration file or CLI flag is missing, malformed, or unknown."""
