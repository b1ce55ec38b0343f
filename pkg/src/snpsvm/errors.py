"""Exception hierarchy shared by the library and the command line."""


class SnpSvmError(Exception):
    """Base class for all package errors."""


class UsageError(SnpSvmError, ValueError):
    """Invalid arguments: empty inputs, out-of-range indices, single-class data."""


class SchemaError(SnpSvmError, ValueError):
    """Structural mismatch between inputs (SNP lists, dimensions, file layout)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DegenerateModelError(SnpSvmError, ArithmeticError):
    """The model has a zero normal vector, so no margin is defined."""
