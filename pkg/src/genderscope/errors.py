"""Exception types shared across the toolkit, with their CLI exit codes."""


class GenderscopeError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(GenderscopeError):
    """Invalid configuration, thresholds, or command usage."""


class DataError(GenderscopeError):
    """Invalid or inconsistent input data."""


class ConflictError(DataError):
    """Records that should agree with each other do not."""


class DegenerateTableError(DataError):
    """A contingency table with an empty row or column margin."""


class NotFoundError(DataError):
    """A requested term, field, or resource does not exist."""


class EstimationError(DataError):
    """Correction factors cannot be estimated from the given sample."""


class StaleRevisionError(ConflictError):
    """A ledger mutation was based on an out-of-date revision."""

    def __init__(self, expected: int, current: int):
        super().__init__(
            f"stale revision: change based on {expected}, ledger is at {current}"
        )
        self.expected = expected
        self.current = current


# Process exit codes. Usage errors also arise from argparse itself, which
# exits with 2 on its own; I/O failures are mapped from OSError.
EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2
EXIT_IO = 3
