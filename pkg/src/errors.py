"""
Exception hierarchy shared by the library and the CLI.

Each class carries the process exit code main.py uses for it.
"""


class AmifError(Exception):
    """Base class for all analyzer errors."""
    exit_code = 1


class ConfigError(AmifError, ValueError):
    """Invalid configuration or command-line usage."""
    exit_code = 2


class DataError(AmifError, ValueError):
    """Input data violates a precondition (bad CSV, shape mismatch, ...)."""
    exit_code = 3


class NumericalError(AmifError, ArithmeticError):
    """A numerical stage could not produce a valid result."""
    exit_code = 4
