"""Exception taxonomy for the package.

Three branches under a common base:

* ``ValidationError``   -- bad inputs caught at construction / call time
* ``AnalysisError``     -- a computation could not produce a sound result
* ``IngestError``       -- file or wire data could not be turned into series

Callers that only want "did anything in this library object" can catch
``DlgdError``.
"""

from __future__ import annotations


class DlgdError(Exception):
    """Base class for every error raised by this package."""


# --------------------------------------------------------------------------
# input validation
# --------------------------------------------------------------------------


class ValidationError(DlgdError):
    """An input violates a documented precondition or invariant."""


class GapInSeries(ValidationError):
    """Month grid is not contiguous at monthly frequency."""


class DomainError(ValidationError):
    """A value lies outside its documented domain (e.g. a rate not in [0, 1])."""


class DegenerateSeries(ValidationError):
    """Series too short or too flat for the requested statistic."""


class ZeroWeightSum(ValidationError):
    """Weighted mean requested but the weights sum to zero."""


class ConstantSeries(ValidationError):
    """All values equal; correlation is undefined."""


class NoOverlap(ValidationError):
    """Two series share fewer than the minimum number of common months."""


class DimensionMismatch(ValidationError):
    """Array shapes are inconsistent with each other."""


class InvalidDof(ValidationError):
    """Degrees of freedom must be a positive integer."""


class NegativeStatistic(ValidationError):
    """An F statistic cannot be negative."""


class UnsupportedLevel(ValidationError):
    """Significance level outside the tabulated set {1, 5, 10}."""


class MonthNotInGrid(ValidationError):
    """A requested month is absent from the series grid."""


class EmptyWindow(ValidationError):
    """A window with no months cannot be assessed."""


class InvalidElgd(ValidationError):
    """ELGD must lie in [0, 1]."""


class InvalidSpec(ValidationError):
    """A synthetic-series spec has a missing, unknown, or out-of-range field."""


# --------------------------------------------------------------------------
# analysis
# --------------------------------------------------------------------------


class AnalysisError(DlgdError):
    """A statistical routine could not produce a sound result."""


class RankDeficient(AnalysisError):
    """Design matrix is numerically rank deficient."""


class InsufficientData(AnalysisError):
    """Not enough observations for the requested fit or test."""


class NonStationaryInput(AnalysisError):
    """A causality test was asked to run on a series with a unit root."""


class NonPositiveDenominator(AnalysisError):
    """The reference-period LGD floor is not positive; no ratio can be formed."""


class ConvergenceError(AnalysisError):
    """An iterative numerical routine did not converge within its budget."""


# --------------------------------------------------------------------------
# ingest / IO
# --------------------------------------------------------------------------


class IngestError(DlgdError):
    """File or wire data could not be converted into a valid series."""


class ParseError(IngestError):
    """A CSV line could not be parsed.

    Carries the 1-based line number and a human-readable reason.
    """

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class WireFormatError(IngestError):
    """An HTTP payload does not match the documented wire format."""


class FrequencyMismatch(IngestError):
    """Remote data is not at monthly frequency."""


class HttpError(IngestError):
    """A non-2xx HTTP status, or transport failure after retries.

    ``status`` is the HTTP status code, or ``None`` for transport-level
    failures (connection refused, timeout) that exhausted the retry budget.
    """

    def __init__(self, status, reason: str = ""):
        self.status = status
        msg = f"HTTP {status}" if status is not None else "transport failure"
        if reason:
            msg = f"{msg}: {reason}"
        super().__init__(msg)


class IoError(IngestError):
    """A local file could not be read or written."""
