"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: usage/config errors -> 1, data errors
-> 2, identification failures -> 3, numerical failures -> 4.
"""


class QrControlError(Exception):
    """Base class for all package errors."""


class InvalidInputError(QrControlError, ValueError):
    """An argument is outside its documented domain."""


class DataError(QrControlError):
    """A dataset file is malformed.

    ``row`` is the 1-based row number of the offending record (header is
    row 1), or None when the problem is not tied to a single row.
    """

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class ConfigError(QrControlError):
    """A run configuration is malformed or contains unknown keys."""


class RankDeficiencyError(QrControlError):
    """The regression design is rank deficient.

    ``columns`` names the dependent columns detected by the pivoted QR
    factorisation of the design.
    """

    def __init__(self, message, columns=()):
        super().__init__(message)
        self.columns = tuple(columns)


class ConvergenceError(QrControlError):
    """The solver stopped before reaching its tolerance.

    Carries the best iterate found so callers can inspect it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class IdentificationError(QrControlError):
    """Estimation cannot proceed because an identification condition fails.

    ``report`` optionally carries the diagnostic object that triggered the
    failure (e.g. a moment-matrix report).
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DegenerateBinsError(InvalidInputError):
    """Quantile-bin discretization asked for more bins than distinct values."""


class DegenerateRangeError(InvalidInputError):
    """Equispaced-bin discretization applied to a constant column."""


class InvalidDgpError(QrControlError):
    """A synthetic-data specification violates its validity conditions."""


class OutOfIdentifiedRangeError(InvalidInputError):
    """A quantile level outside the trimmed range was requested."""


class BootstrapError(QrControlError):
    """Too many bootstrap replications failed to produce bands."""
