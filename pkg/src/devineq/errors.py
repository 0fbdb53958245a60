"""Exception hierarchy shared by all devineq modules.

Two families matter to callers: ``InputError`` (bad files, bad schemas,
bad joins -- CLI exit code 1) and ``NumericError`` (degenerate matrices,
non-convergence, underflow -- CLI exit code 2).
"""


class DevineqError(Exception):
    """Base class for all package errors."""


class InputError(DevineqError):
    """Malformed or inconsistent input; maps to CLI exit code 1."""


class NumericError(DevineqError):
    """Numeric degeneracy or failure; maps to CLI exit code 2."""


# --- ingest -----------------------------------------------------------

class MissingColumn(InputError):
    """A column required by the schema mapping is absent from the file."""


class ParseFailure(InputError):
    """A cell failed to parse (or a required field was empty)."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class DuplicateKey(InputError):
    """A key already seen in this file occurred again."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class InvariantViolation(InputError):
    """A parsed record violates a domain invariant."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class EmptyResult(InputError):
    """A selection (e.g. pooling by year range) matched nothing."""


# --- bipartite --------------------------------------------------------

class YearAbsent(InputError):
    """The requested year has no slice in the panel."""


class AllZeroSlice(NumericError):
    """A year slice sums to zero; shares are undefined."""


class DegenerateMatrix(NumericError):
    """Binarization or pruning left no usable matrix."""


class OrderMismatch(InputError):
    """A supplied ordering is not a permutation of the matrix ids."""


# --- fitness ----------------------------------------------------------

class NoConvergence(NumericError):
    """Neither values nor rankings converged within the iteration cap."""


class NumericUnderflow(NumericError):
    """An iterate left the representable range of double precision."""


# --- inequality -------------------------------------------------------

class AllZeroIncomes(NumericError):
    """Every income/wage in the distribution is zero."""


class InconsistentTotals(NumericError):
    """Group counts/totals disagree with the stated grand totals."""


class NoSectors(NumericError):
    """No sector with positive employment remains."""


# --- development ------------------------------------------------------

class EmptyYear(InputError):
    """No observation available for a year that was asked for."""


class MissingInput(InputError):
    """A record lacks one of the two series the index combines."""

    def __init__(self, unit_id: str, year: int):
        super().__init__(f"missing input for ({unit_id}, {year})")
        self.unit_id = unit_id
        self.year = year


# --- smoothing --------------------------------------------------------

class TooFewObservations(InputError):
    """Fewer observations than the estimator can work with."""


class DegenerateBandwidth(NumericError):
    """Bandwidth selection produced zero width (constant predictor)."""


# --- pipeline ---------------------------------------------------------

class MissingJoin(InputError):
    """The intersection of the input tables is empty."""

    def __init__(self, missing_pairs):
        self.missing_pairs = list(missing_pairs)
        preview = ", ".join(f"({u}, {y})" for u, y in self.missing_pairs[:5])
        more = "" if len(self.missing_pairs) <= 5 else f" and {len(self.missing_pairs) - 5} more"
        super().__init__(f"no joinable observations; unmatched: {preview}{more}")


class EmptyWindow(InputError):
    """A requested time window contains no observations."""
