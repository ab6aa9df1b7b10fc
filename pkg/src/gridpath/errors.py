"""Exception types shared across the package."""


class GridPathError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(GridPathError):
    """Malformed map text. Carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DimensionError(GridPathError):
    """Array or grid dimensions incompatible with the requested operation."""


class KindMismatchError(GridPathError):
    """A heuristic map of the wrong kind was supplied to a consumer."""


class FormatError(GridPathError):
    """Corrupt or unsupported binary heuristic-map stream."""


class RangeError(GridPathError):
    """Heuristic-map values outside the valid range for their kind."""


class ContractViolation(GridPathError):
    """Caller broke a documented precondition (mismatched sources, bad dims)."""


class NoPathError(GridPathError):
    """Raised by operations that require a solvable instance."""
