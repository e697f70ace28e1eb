"""Exception types shared across the package and the CLI exit-code mapping."""

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_BLOWUP = 2
EXIT_VERIFY = 3


class ConfigurationError(ValueError):
    """Invalid parameters, grid, time step or config text."""


class DomainError(ValueError):
    """Input outside the region where a bound or estimate is asserted."""


class UnsupportedConfigurationError(ConfigurationError):
    """Operation not defined for the given model (e.g. energy of a massive run)."""


class BlowupError(RuntimeError):
    """A non-finite value appeared during time stepping."""
