"""Exception types shared across the package."""


class CBAIError(Exception):
    """Base class for all package errors."""


class ConfigError(CBAIError, ValueError):
    """Invalid parameters, configuration values or arguments."""


class AssumptionError(ConfigError):
    """The instance violates best-arm identifiability (assumption (i)).

    ``arm`` carries the index of the offending arm when known.
    """

    def __init__(self, message, arm=None):
        super().__init__(message)
        self.arm = arm


class InfeasibleError(CBAIError, ValueError):
    """A bound has a non-positive effective gap, so identifiability is lost."""


class StateError(CBAIError, RuntimeError):
    """An operation was called on an object in the wrong state."""


class IngestionError(ConfigError):
    """A dataset export could not be turned into a bandit instance."""
