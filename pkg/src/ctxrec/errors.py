"""Exception types and the process exit codes they map to."""

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_CONTRACT = 3


class CtxrecError(Exception):
    """Base class for package-specific errors."""

    exit_code = EXIT_CONTRACT


class SchemaError(CtxrecError):
    """A required column is missing from the input file or column mapping."""

    exit_code = EXIT_VALIDATION


class CohortError(CtxrecError):
    """The evaluation cohort filter left no usable users."""

    exit_code = EXIT_VALIDATION


class ConfigError(CtxrecError):
    """An experiment or generator configuration value is invalid."""


class ContractError(CtxrecError):
    """A caller violated an interface contract (schema mismatch, bad input)."""


class EmptyProfileError(CtxrecError):
    """A user profile carries no positive weight, so nothing can be recommended."""
