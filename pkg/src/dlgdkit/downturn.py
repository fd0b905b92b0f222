"""Economic-downturn detection and conservative downturn-LGD add-ons.

A downturn is a stretch of at least ``min_window`` consecutive months in
which the default rate strictly exceeds its long-run mean plus one sample
standard deviation.  LGD observed inside such windows is compared against
LGD over a reference period, and the percentage excess becomes an
additive capital add-on:

    numerator    = weighted mean LGD in the downturn + its std
    denominator  = weighted mean LGD in the reference period - its std
    ratio        = numerator / denominator
    addon        = (ratio - 1) * reference weighted mean LGD

Two variants differ only in the reference period: the strict variant
measures against low-default months only (RD strictly below its mean),
the lenient variant against the whole sample.  The final downturn LGD is
ELGD plus the add-on, capped at 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from dlgdkit.errors import (
    DegenerateSeries,
    DomainError,
    EmptyWindow,
    InsufficientData,
    InvalidElgd,
    MonthNotInGrid,
    NonPositiveDenominator,
    ZeroWeightSum,
)
from dlgdkit.series import AlignedPair, MonthIndex, MonthlySeries, summary


class Variant(Enum):
    """Which reference period the downturn LGD is measured against."""

    STRICT = "strict"      # low-default months only; the more conservative
    LENIENT = "lenient"    # whole sample

    @property
    def designation(self) -> str:
        return {"strict": "dLGD1", "lenient": "dLGD2"}[self.value]


class PeriodTag(Enum):
    DOWNTURN = "downturn"
    LOW_DEFAULT = "low-default"
    WHOLE = "whole"


@dataclass(frozen=True)
class DownturnWindow:
    """A maximal run of months with RD above the exceedance threshold."""

    start: MonthIndex
    end: MonthIndex
    months: Tuple[MonthIndex, ...]
    peak_rd: float

    def __len__(self) -> int:
        return len(self.months)


@dataclass(frozen=True)
class PeriodLgdStats:
    """Weighted mean and unweighted sample std of LGD over given months."""

    tag: PeriodTag
    months: Tuple[MonthIndex, ...]
    weighted_mean: float
    std: float
    n: int


@dataclass(frozen=True)
class DownturnAssessment:
    """The conservative downturn-to-reference LGD comparison.

    Invariants (validated at construction): ratio = numerator/denominator
    and addon_absolute = relative_uplift * base_elgd, both to 1e-12.
    """

    variant: Variant
    numerator: float
    denominator: float
    ratio: float
    relative_uplift: float
    base_elgd: float
    addon_absolute: float
    formula: str
    downturn_stats: PeriodLgdStats
    reference_stats: PeriodLgdStats

    def __post_init__(self):
        if not math.isclose(
            self.ratio, self.numerator / self.denominator, rel_tol=1e-12, abs_tol=1e-12
        ):
            raise DomainError("ratio must equal numerator/denominator")
        if not math.isclose(
            self.addon_absolute,
            self.relative_uplift * self.base_elgd,
            rel_tol=1e-12,
            abs_tol=1e-12,
        ):
            raise DomainError("addon must equal relative_uplift * base_elgd")


@dataclass(frozen=True)
class DownturnLgd:
    """A final downturn LGD value, with the cap made explicit."""

    value: float
    capped: bool
    elgd: float
    addon: float


def detect_downturns(
    rd: MonthlySeries, min_window: int = 6
) -> List[DownturnWindow]:
    """Maximal runs of months with RD strictly above mean + one std.

    The threshold uses the full-sample mean and sample standard deviation
    of the series itself.  Runs shorter than ``min_window`` are dropped.
    An empty list is a valid outcome (no downturn in the sample).
    """
    if min_window < 1:
        raise DomainError(f"min_window must be >= 1, got {min_window}")
    if not rd.is_rate:
        raise DomainError("downturn detection expects a rate series")
    if len(rd) < 2:
        raise DegenerateSeries("downturn detection needs at least 2 observations")
    if len(rd) < min_window:
        raise InsufficientData(
            f"series has {len(rd)} months; a downturn needs {min_window}"
        )
    stats = summary(rd)
    if stats.std == 0.0:
        raise DegenerateSeries(
            f"{rd.name} is constant; the exceedance threshold is undefined"
        )
    threshold = stats.mean + stats.std
    above = rd.values > threshold
    windows: List[DownturnWindow] = []
    i = 0
    n = len(rd)
    while i < n:
        if not above[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and above[j + 1]:
            j += 1
        if j - i + 1 >= min_window:
            months = rd.months[i : j + 1]
            windows.append(
                DownturnWindow(
                    start=months[0],
                    end=months[-1],
                    months=months,
                    peak_rd=float(rd.values[i : j + 1].max()),
                )
            )
        i = j + 1
    return windows


def exceedance_threshold(rd: MonthlySeries) -> float:
    """The long-run mean plus one sample std of a default-rate series."""
    stats = summary(rd)
    return stats.mean + stats.std


def low_default_months(rd: MonthlySeries) -> Tuple[MonthIndex, ...]:
    """Months whose RD lies strictly below the full-sample mean."""
    if len(rd) < 2:
        raise DegenerateSeries("low-default selection needs at least 2 observations")
    mean = summary(rd).mean
    months = tuple(m for m, v in zip(rd.months, rd.values) if v < mean)
    if not months:
        raise DegenerateSeries(
            f"no month of {rd.name} lies below its mean; "
            f"reference period would be empty"
        )
    return months


def period_lgd_stats(
    pair: AlignedPair, months: Sequence[MonthIndex], tag: PeriodTag
) -> PeriodLgdStats:
    """LGD weighted mean and sample std restricted to the given months.

    The mean honours the LGD series weights (observation counts or
    exposure); the std is the plain sample standard deviation, matching
    how the conservative add-on is constructed.
    """
    months = tuple(months)
    if not months:
        raise EmptyWindow(f"cannot compute {tag.value} LGD over zero months")
    if len(months) < 2:
        raise DegenerateSeries(
            f"{tag.value} period has {len(months)} month; std needs at least 2"
        )
    lgd = pair.lgd
    try:
        idx = np.array([lgd.index_of(m) for m in months], dtype=np.intp)
    except KeyError as exc:
        raise MonthNotInGrid(f"month {exc.args[0]} not in the aligned grid") from None
    values = lgd.values[idx]
    weights = None
    wsum = 0.0
    if lgd.weights is not None:
        weights = lgd.weights[idx]
        wsum = float(weights.sum())
        if wsum == 0.0:
            raise ZeroWeightSum(f"{tag.value} period weights sum to zero")
    if np.all(values == values[0]):
        # Exactly constant over the period: any weighting gives the common
        # value, and the std is zero by definition, not by cancellation.
        mean = float(values[0])
        std = 0.0
    else:
        if weights is not None:
            mean = float(np.dot(weights, values) / wsum)
        else:
            mean = float(values.mean())
        center = float(values.mean())
        std = float(math.sqrt(float(np.sum((values - center) ** 2)) / (len(values) - 1)))
    return PeriodLgdStats(
        tag=tag, months=months, weighted_mean=mean, std=std, n=len(months)
    )


def assess(
    pair: AlignedPair,
    window_months: Sequence[MonthIndex],
    variant: Variant = Variant.STRICT,
) -> DownturnAssessment:
    """Compare downturn LGD against the variant's reference period.

    ``window_months`` are the downturn months (typically the union of the
    detected windows).  The add-on is quoted both as a relative uplift and
    as an absolute amount on the reference ELGD, rendered in the formula
    string as 'dLGD = <addon> + ELGD'.
    """
    variant = Variant(variant)
    window_months = tuple(window_months)
    if not window_months:
        raise EmptyWindow("assessment needs at least one downturn month")
    downturn_stats = period_lgd_stats(pair, window_months, PeriodTag.DOWNTURN)
    if variant is Variant.STRICT:
        reference_months = low_default_months(pair.rd)
        reference_tag = PeriodTag.LOW_DEFAULT
    else:
        reference_months = pair.months
        reference_tag = PeriodTag.WHOLE
    reference_stats = period_lgd_stats(pair, reference_months, reference_tag)
    numerator = downturn_stats.weighted_mean + downturn_stats.std
    denominator = reference_stats.weighted_mean - reference_stats.std
    if denominator <= 0.0:
        raise NonPositiveDenominator(
            f"reference LGD floor is {denominator:.6f}; "
            f"the downturn ratio is undefined"
        )
    ratio = numerator / denominator
    relative_uplift = ratio - 1.0
    base_elgd = reference_stats.weighted_mean
    addon_absolute = relative_uplift * base_elgd
    return DownturnAssessment(
        variant=variant,
        numerator=numerator,
        denominator=denominator,
        ratio=ratio,
        relative_uplift=relative_uplift,
        base_elgd=base_elgd,
        addon_absolute=addon_absolute,
        formula=f"dLGD = {addon_absolute:.4f} + ELGD",
        downturn_stats=downturn_stats,
        reference_stats=reference_stats,
    )


def downturn_lgd(assessment: DownturnAssessment, elgd: float) -> DownturnLgd:
    """Apply an assessment's add-on to a portfolio ELGD, capping at 1."""
    if not 0.0 <= elgd <= 1.0 or not math.isfinite(elgd):
        raise InvalidElgd(f"ELGD must lie in [0, 1], got {elgd}")
    raw = elgd + assessment.addon_absolute
    capped = raw > 1.0
    return DownturnLgd(
        value=min(raw, 1.0),
        capped=capped,
        elgd=elgd,
        addon=assessment.addon_absolute,
    )


def union_months(windows: Iterable[DownturnWindow]) -> Tuple[MonthIndex, ...]:
    """All months covered by any window, in calendar order."""
    seen = set()
    out: List[MonthIndex] = []
    for window in windows:
        for month in window.months:
            if month not in seen:
                seen.add(month)
                out.append(month)
    return tuple(sorted(out))
