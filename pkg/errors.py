"""Exception hierarchy for taxigraph; each class knows its CLI exit code."""

from typing import Optional

from config import EXIT_IO, EXIT_NUMERIC, EXIT_USAGE


class TaxiGraphError(Exception):
    """Base class for all errors raised by taxigraph."""

    exit_code = 1


class ConfigError(TaxiGraphError):
    """Bad configuration: missing CSV column, invalid flag or config value."""

    exit_code = EXIT_USAGE


class DomainError(TaxiGraphError):
    """Input outside an operation's domain (empty records, k out of range, ...)."""

    exit_code = EXIT_USAGE


class NumericError(TaxiGraphError):
    """A numeric kernel could not produce a valid result."""

    exit_code = EXIT_NUMERIC


class SingularDegreeError(NumericError):
    """A node has zero degree where a degree inverse is required."""

    def __init__(self, node: int, message: Optional[str] = None):
        self.node = node
        super().__init__(message or f"node {node} has zero degree")


class ConvergenceError(NumericError):
    """An iterative method ran out of iterations."""


class InputError(TaxiGraphError):
    """An input file could not be read."""

    exit_code = EXIT_IO


class GraphFormatError(InputError):
    """A graph or assignments file is malformed."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")
