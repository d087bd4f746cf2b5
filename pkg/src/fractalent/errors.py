"""Exception hierarchy mapped onto CLI exit codes."""


class FractalentError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ValidationError(FractalentError):
    """Bad user input: config values, geometry parameters, malformed files."""

    exit_code = 2


class CapacityError(FractalentError):
    """Requested problem size exceeds the configured dense-solver budget."""

    exit_code = 3


class NumericalError(FractalentError):
    """A numerical routine failed to converge or produced invalid output."""

    exit_code = 4
