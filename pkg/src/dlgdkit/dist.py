"""Student-t and F distribution functions, and Dickey-Fuller critical values.

The CDFs are exact reductions to the regularized incomplete beta function
(evaluated in the kernel layer by continued fraction):

    t_cdf(x, d)      left tail via I_z(d/2, 1/2), z = d / (d + x^2)
    f_cdf(x, d1, d2) I_w(d1/2, d2/2),            w = d1 x / (d1 x + d2)

The unit-root critical values are the classical tabulated quantiles of
the Dickey-Fuller t distribution (Fuller 1976; the widely reprinted
finite-sample table, e.g. Hamilton 1994, Table B.6), embedded for the
three deterministic-term models.  Between tabulated sample sizes the
quantile is linearly interpolated; below the smallest tabulation the
smallest-sample row is used, beyond the largest the asymptotic row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Tuple

from dlgdkit import _kernels
from dlgdkit.errors import (
    DomainError,
    InvalidDof,
    NegativeStatistic,
    UnsupportedLevel,
)


class DeterministicTerms(Enum):
    """Deterministic regressors included in a unit-root regression."""

    NONE = "none"
    CONSTANT = "constant"
    CONSTANT_TREND = "constant+trend"


@dataclass(frozen=True)
class CriticalValueTable:
    """Finite-sample quantile table for one deterministic-terms model.

    ``breakpoints`` are sample sizes in increasing order; ``rows[i]`` holds
    the (1%, 5%, 10%) critical values at ``breakpoints[i]``; ``asymptotic``
    is the limiting row.
    """

    model: DeterministicTerms
    breakpoints: Tuple[int, ...]
    rows: Tuple[Tuple[float, float, float], ...]
    asymptotic: Tuple[float, float, float]


_LEVELS = (1, 5, 10)

_DF_TABLES: Dict[DeterministicTerms, CriticalValueTable] = {
    DeterministicTerms.NONE: CriticalValueTable(
        model=DeterministicTerms.NONE,
        breakpoints=(25, 50, 100, 250, 500),
        rows=(
            (-2.66, -1.95, -1.60),
            (-2.62, -1.95, -1.61),
            (-2.60, -1.95, -1.61),
            (-2.58, -1.95, -1.62),
            (-2.58, -1.95, -1.62),
        ),
        asymptotic=(-2.58, -1.95, -1.62),
    ),
    DeterministicTerms.CONSTANT: CriticalValueTable(
        model=DeterministicTerms.CONSTANT,
        breakpoints=(25, 50, 100, 250, 500),
        rows=(
            (-3.75, -3.00, -2.63),
            (-3.58, -2.93, -2.60),
            (-3.51, -2.89, -2.58),
            (-3.46, -2.88, -2.57),
            (-3.44, -2.87, -2.57),
        ),
        asymptotic=(-3.43, -2.86, -2.57),
    ),
    DeterministicTerms.CONSTANT_TREND: CriticalValueTable(
        model=DeterministicTerms.CONSTANT_TREND,
        breakpoints=(25, 50, 100, 250, 500),
        rows=(
            (-4.38, -3.60, -3.24),
            (-4.15, -3.50, -3.18),
            (-4.04, -3.45, -3.15),
            (-3.99, -3.43, -3.13),
            (-3.98, -3.42, -3.13),
        ),
        asymptotic=(-3.96, -3.41, -3.12),
    ),
}


def alpha_to_level(alpha: float) -> int:
    """Map a significance level in probability form to a tabulated percent.

    Only the tabulated levels 1%, 5%, and 10% are supported.
    """
    level = round(alpha * 100)
    if level not in _LEVELS or not math.isclose(alpha, level / 100):
        raise UnsupportedLevel(
            f"alpha must be 0.01, 0.05, or 0.10 (tabulated levels), got {alpha}"
        )
    return level


def _check_dof(dof: int, name: str) -> int:
    if not isinstance(dof, (int,)) or isinstance(dof, bool):
        raise InvalidDof(f"{name} must be an integer, got {dof!r}")
    if dof < 1:
        raise InvalidDof(f"{name} must be >= 1, got {dof}")
    return dof


def t_cdf(x: float, dof: int) -> float:
    """P(T <= x) for Student's t with ``dof`` degrees of freedom."""
    _check_dof(dof, "dof")
    x = float(x)
    if math.isnan(x):
        raise DomainError("t statistic must not be NaN")
    if math.isinf(x):
        return 1.0 if x > 0 else 0.0
    if x == 0.0:
        return 0.5
    z = dof / (dof + x * x)
    tail = 0.5 * _kernels.reg_inc_beta(0.5 * dof, 0.5, z)
    return 1.0 - tail if x > 0 else tail


def f_cdf(x: float, d1: int, d2: int) -> float:
    """P(F <= x) for the F distribution with (d1, d2) degrees of freedom."""
    _check_dof(d1, "d1")
    _check_dof(d2, "d2")
    x = float(x)
    if math.isnan(x):
        raise DomainError("F statistic must not be NaN")
    if x < 0.0:
        raise NegativeStatistic(f"F statistic must be >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    w = d1 * x / (d1 * x + d2)
    return _kernels.reg_inc_beta(0.5 * d1, 0.5 * d2, w)


def df_critical(model: DeterministicTerms, n: int, level: int) -> float:
    """Dickey-Fuller critical value for a regression with ``n`` observations.

    ``level`` is the significance level in percent and must be 1, 5, or 10.
    """
    if level not in _LEVELS:
        raise UnsupportedLevel(f"level must be one of {_LEVELS}, got {level!r}")
    if n < 10:
        raise DomainError(f"critical values need n >= 10, got {n}")
    table = _DF_TABLES[DeterministicTerms(model)]
    col = _LEVELS.index(level)
    bp = table.breakpoints
    if n <= bp[0]:
        return table.rows[0][col]
    if n > bp[-1]:
        return table.asymptotic[col]
    for i in range(1, len(bp)):
        if n <= bp[i]:
            lo_n, hi_n = bp[i - 1], bp[i]
            lo_v = table.rows[i - 1][col]
            hi_v = table.rows[i][col]
            frac = (n - lo_n) / (hi_n - lo_n)
            return lo_v + frac * (hi_v - lo_v)
    raise AssertionError("unreachable")


def df_critical_row(model: DeterministicTerms, n: int) -> Dict[int, float]:
    """Critical values at all three tabulated levels, keyed by percent."""
    return {level: df_critical(model, n, level) for level in _LEVELS}
