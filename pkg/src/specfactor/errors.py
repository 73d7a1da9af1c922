"""Exception types shared across the package.

The CLI maps these onto exit codes: usage problems exit 2, data problems
exit 3, numerical failures exit 4.
"""


class SpecfactorError(Exception):
    """Base class for errors raised by this package."""


class DataError(SpecfactorError):
    """Malformed or unusable input data (ragged CSV, zero-variance row, ...)."""


class ZeroVarianceRowError(DataError):
    """A residual row is constant; standardization is impossible."""

    def __init__(self, row: int, message: str | None = None):
        self.row = row
        super().__init__(message or f"row {row} has (near-)zero variance; cannot standardize")


class GridMismatchError(SpecfactorError):
    """Two densities do not share identical bin edges."""


class NumericalError(SpecfactorError):
    """A numerical routine failed (root tracking, degenerate cubic, empty density)."""
