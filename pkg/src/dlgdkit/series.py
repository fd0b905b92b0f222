"""Monthly series primitives.

Everything downstream works on contiguous monthly grids of LGD (loss
given default) and RD (rate of default) observations.  The types here are
immutable and validate their invariants at construction, so the analysis
layers never have to re-check them:

* ``MonthIndex``     -- a (year, month) calendar point with total order
* ``MonthlySeries``  -- one named series on a contiguous month grid
* ``AlignedPair``    -- an RD series and an LGD series on the same grid
* ``SummaryStats``   -- n / mean / sample std / weighted mean

Rates are stored as fractions in [0, 1]; a series carries an ``is_rate``
flag that turns the range check on.  Weights are optional and, when
present, cover every observation (all-or-nothing).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Tuple

import numpy as np

from dlgdkit.errors import (
    ConstantSeries,
    DegenerateSeries,
    DimensionMismatch,
    DomainError,
    GapInSeries,
    NoOverlap,
    ZeroWeightSum,
)

#: Minimum number of common months required to align two series.
MIN_OVERLAP = 3

#: Recognized series roles for CSV round-trips.
SERIES_KINDS = ("lgd", "rd")


@functools.total_ordering
@dataclass(frozen=True)
class MonthIndex:
    """A calendar month, totally ordered by (year, month)."""

    year: int
    month: int

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise DomainError(f"month must be in 1..12, got {self.month}")

    def __lt__(self, other: "MonthIndex") -> bool:
        return (self.year, self.month) < (other.year, other.month)

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"

    @classmethod
    def parse(cls, text: str) -> "MonthIndex":
        """Parse 'YYYY-MM'. Raises DomainError on malformed input."""
        parts = text.split("-")
        if len(parts) != 2 or len(parts[0]) != 4 or len(parts[1]) != 2:
            raise DomainError(f"expected YYYY-MM, got {text!r}")
        try:
            year, month = int(parts[0]), int(parts[1])
        except ValueError:
            raise DomainError(f"expected YYYY-MM, got {text!r}") from None
        return cls(year, month)

    def ordinal(self) -> int:
        """Months since year 0; consecutive months differ by exactly 1."""
        return self.year * 12 + (self.month - 1)

    def plus(self, months: int) -> "MonthIndex":
        total = self.ordinal() + months
        return MonthIndex(total // 12, total % 12 + 1)


@functools.lru_cache(maxsize=64)
def month_range(start: MonthIndex, length: int) -> Tuple[MonthIndex, ...]:
    """A contiguous grid of ``length`` months starting at ``start``."""
    if length < 1:
        raise DomainError(f"length must be >= 1, got {length}")
    return tuple(start.plus(i) for i in range(length))


def _as_readonly_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be one-dimensional")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MonthlySeries:
    """A named series of monthly observations on a contiguous grid.

    ``values`` (and ``weights`` if given) are read-only float64 arrays
    parallel to ``months``.  ``is_rate`` enables the [0, 1] range check;
    ``kind`` ('lgd' or 'rd') records the series role for CSV round-trips
    and may be None for derived series.
    """

    name: str
    months: Tuple[MonthIndex, ...]
    values: np.ndarray
    weights: Optional[np.ndarray] = None
    is_rate: bool = False
    kind: Optional[str] = None
    _pos: dict = field(init=False, repr=False)

    def __post_init__(self):
        if not self.name:
            raise DomainError("series name must be non-empty")
        months = tuple(self.months)
        values = _as_readonly_array(self.values, "values")
        if len(months) == 0:
            raise DegenerateSeries("series must contain at least one month")
        if len(months) != len(values):
            raise DimensionMismatch(
                f"{len(months)} months but {len(values)} values"
            )
        ordinals = [m.ordinal() for m in months]
        for i in range(1, len(ordinals)):
            if ordinals[i] != ordinals[i - 1] + 1:
                raise GapInSeries(
                    f"month grid breaks between {months[i - 1]} and {months[i]}"
                )
        if not np.all(np.isfinite(values)):
            raise DomainError("values must be finite")
        if self.is_rate and (np.any(values < 0.0) or np.any(values > 1.0)):
            raise DomainError("rate values must lie in [0, 1]")
        weights = self.weights
        if weights is not None:
            weights = _as_readonly_array(weights, "weights")
            if len(weights) != len(values):
                raise DimensionMismatch(
                    f"{len(weights)} weights but {len(values)} values"
                )
            if not np.all(np.isfinite(weights)) or np.any(weights < 0.0):
                raise DomainError("weights must be finite and non-negative")
        if self.kind is not None and self.kind not in SERIES_KINDS:
            raise DomainError(f"kind must be one of {SERIES_KINDS}, got {self.kind!r}")
        object.__setattr__(self, "months", months)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "_pos", {m: i for i, m in enumerate(months)})

    # -- container protocol ------------------------------------------------

    def __len__(self) -> int:
        return len(self.months)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MonthlySeries):
            return NotImplemented
        if (self.name, self.months, self.is_rate, self.kind) != (
            other.name,
            other.months,
            other.is_rate,
            other.kind,
        ):
            return False
        if not np.array_equal(self.values, other.values):
            return False
        if (self.weights is None) != (other.weights is None):
            return False
        return self.weights is None or np.array_equal(self.weights, other.weights)

    __hash__ = None  # mutable-array payload; not hashable

    @property
    def start(self) -> MonthIndex:
        return self.months[0]

    @property
    def end(self) -> MonthIndex:
        return self.months[-1]

    def index_of(self, month: MonthIndex) -> int:
        """Position of ``month`` in the grid; KeyError if absent."""
        return self._pos[month]

    def __contains__(self, month: MonthIndex) -> bool:
        return month in self._pos

    def slice(self, lo: int, hi: int, name: Optional[str] = None) -> "MonthlySeries":
        """Sub-series over positions [lo, hi)."""
        return MonthlySeries(
            name=name or self.name,
            months=self.months[lo:hi],
            values=self.values[lo:hi].copy(),
            weights=None if self.weights is None else self.weights[lo:hi].copy(),
            is_rate=self.is_rate,
            kind=self.kind,
        )


@dataclass(frozen=True)
class SummaryStats:
    """n, mean, sample standard deviation, and weighted mean."""

    n: int
    mean: float
    std: float
    weighted_mean: float


@dataclass(frozen=True)
class AlignedPair:
    """An RD series and an LGD series sharing one month grid."""

    rd: MonthlySeries
    lgd: MonthlySeries

    def __post_init__(self):
        if self.rd.months != self.lgd.months:
            raise DimensionMismatch("rd and lgd must share an identical month grid")
        if len(self.rd) < MIN_OVERLAP:
            raise NoOverlap(
                f"aligned pair needs at least {MIN_OVERLAP} months, got {len(self.rd)}"
            )

    @property
    def months(self) -> Tuple[MonthIndex, ...]:
        return self.rd.months

    def __len__(self) -> int:
        return len(self.rd)


def summary(series: MonthlySeries) -> SummaryStats:
    """Mean, sample std (n-1 denominator), and weighted mean.

    A constant series is reported with std exactly 0.0 and mean exactly
    equal to the common value, so 'std == 0 iff all values equal' holds in
    float arithmetic, not just in theory.
    """
    values = series.values
    n = len(values)
    if n < 2:
        raise DegenerateSeries("summary needs at least 2 observations")
    if np.all(values == values[0]):
        mean = float(values[0])
        std = 0.0
    else:
        mean = float(values.mean())
        std = float(math.sqrt(float(np.sum((values - mean) ** 2)) / (n - 1)))
    if series.weights is not None:
        wsum = float(series.weights.sum())
        if wsum == 0.0:
            raise ZeroWeightSum("weights sum to zero")
        weighted_mean = float(np.dot(series.weights, values) / wsum)
    else:
        weighted_mean = mean
    return SummaryStats(n=n, mean=mean, std=std, weighted_mean=weighted_mean)


def pearson(pair: AlignedPair) -> float:
    """Pearson correlation between the RD and LGD series of a pair."""
    x = pair.rd.values
    y = pair.lgd.values
    if np.all(x == x[0]):
        raise ConstantSeries(f"{pair.rd.name} is constant; correlation undefined")
    if np.all(y == y[0]):
        raise ConstantSeries(f"{pair.lgd.name} is constant; correlation undefined")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        # Non-equal values whose spread underflows behave as constant.
        raise ConstantSeries("a series has vanishing variance; correlation undefined")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def differenced(series: MonthlySeries) -> MonthlySeries:
    """First difference; one month shorter, starting at the second month.

    The result is a change series: the rate flag, role, and weights do not
    carry over.
    """
    if len(series) < 2:
        raise DegenerateSeries("differencing needs at least 2 observations")
    return MonthlySeries(
        name=f"diff({series.name})",
        months=series.months[1:],
        values=np.diff(series.values),
        weights=None,
        is_rate=False,
        kind=None,
    )


def align(rd: MonthlySeries, lgd: MonthlySeries) -> AlignedPair:
    """Restrict both series to their common months.

    Raises NoOverlap when fewer than MIN_OVERLAP months are shared.
    """
    start = max(rd.start, lgd.start)
    end = min(rd.end, lgd.end)
    length = end.ordinal() - start.ordinal() + 1
    if length < MIN_OVERLAP:
        raise NoOverlap(
            f"{rd.name} and {lgd.name} share {max(length, 0)} months; "
            f"need at least {MIN_OVERLAP}"
        )
    rd_lo = rd.index_of(start)
    lgd_lo = lgd.index_of(start)
    return AlignedPair(
        rd=rd.slice(rd_lo, rd_lo + length),
        lgd=lgd.slice(lgd_lo, lgd_lo + length),
    )


def month_span(months: Iterable[MonthIndex]) -> str:
    """Human-readable 'YYYY-MM..YYYY-MM' span of a month collection."""
    ms = sorted(months)
    if not ms:
        return "(empty)"
    return f"{ms[0]}..{ms[-1]}"
