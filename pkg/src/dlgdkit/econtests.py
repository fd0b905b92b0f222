"""Unit-root and causality tests on monthly series.

Augmented Dickey-Fuller
-----------------------
``adf_test`` regresses the first difference on the lagged level, the
deterministic terms of the chosen model, and k lagged differences.  The
lag order k is picked by minimum AIC over 0..max_lags, with all candidate
fits evaluated on the common row set trimmed at max_lags (so their AICs
are comparable), and the reported statistic comes from a refit at the
chosen k on the longest usable sample.  The statistic is the t value on
the lagged level and is compared against the tabulated Dickey-Fuller
critical values, which are left-tailed: the series is called stationary
exactly when the statistic falls below the critical value at alpha.

Granger causality
-----------------
``granger_test`` runs the single-equation F form: the unrestricted model
regresses the effect on a constant, p of its own lags, and p lags of the
candidate cause; the restricted model drops the cause lags and is fitted
on the identical rows.  Both series must pass the ADF stationarity gate
(constant model, same alpha) unless explicitly waived, since the F test
is only meaningful on stationary inputs.  ``granger_grid`` evaluates both
directions over lags 1..max_lag and records skips instead of raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from dlgdkit.dist import DeterministicTerms, alpha_to_level, df_critical_row, f_cdf
from dlgdkit.errors import (
    DomainError,
    InsufficientData,
    NonStationaryInput,
    RankDeficient,
)
from dlgdkit.regression import DesignMatrix, OlsFit, ols_fit
from dlgdkit.series import AlignedPair, MonthlySeries

#: Default lag budget for the ADF lag search.
DEFAULT_ADF_MAX_LAGS = 10

#: Minimum observations beyond the lag budget for a meaningful ADF fit.
_ADF_MARGIN = 10


class UnitRootVerdict(Enum):
    STATIONARY = "stationary"
    HAS_UNIT_ROOT = "has-unit-root"


class CausalityVerdict(Enum):
    CAUSES = "causes"
    DOES_NOT_CAUSE = "does-not-cause"


@dataclass(frozen=True)
class AdfResult:
    """Outcome of one augmented Dickey-Fuller test."""

    series_name: str
    model: DeterministicTerms
    lags_used: int
    nobs: int
    statistic: float
    critical_values: Dict[int, float]
    alpha: float
    verdict: UnitRootVerdict


@dataclass(frozen=True)
class VarModel:
    """A bivariate VAR(p): two OLS equations on one shared regressor stack."""

    order: int
    t_eff: int
    rd_equation: OlsFit
    lgd_equation: OlsFit


@dataclass(frozen=True)
class GrangerResult:
    """Outcome of one directional Granger F test."""

    cause: str
    effect: str
    lag: int
    t_eff: int
    f_statistic: float
    d1: int
    d2: int
    p_value: float
    alpha: float
    verdict: CausalityVerdict
    rss_restricted: float
    rss_unrestricted: float


@dataclass(frozen=True)
class GrangerCell:
    """One grid entry: either a result or a reason it was skipped."""

    cause: str
    effect: str
    lag: int
    result: Optional[GrangerResult]
    skip_reason: Optional[str]

    @property
    def computed(self) -> bool:
        return self.result is not None


def _det_columns(model: DeterministicTerms, rows: int) -> Tuple[List[np.ndarray], List[str]]:
    if model is DeterministicTerms.NONE:
        return [], []
    if model is DeterministicTerms.CONSTANT:
        return [np.ones(rows)], ["const"]
    return [np.ones(rows), np.arange(1.0, rows + 1.0)], ["const", "trend"]


def _adf_design(
    y: np.ndarray, dy: np.ndarray, k: int, model: DeterministicTerms
) -> Tuple[DesignMatrix, np.ndarray]:
    """Design for the ADF regression with k lagged differences.

    Rows are t = k+1..n-1 in level indexing: target dy[t], regressors
    [det terms, y[t-1], dy[t-1..t-k]].
    """
    n = len(y)
    rows = n - 1 - k
    cols, names = _det_columns(model, rows)
    cols.append(y[k : n - 1])
    names.append("level[-1]")
    for j in range(1, k + 1):
        cols.append(dy[k - j : n - 1 - j])
        names.append(f"dlevel[-{j}]")
    return DesignMatrix(np.column_stack(cols), tuple(names)), dy[k:]


def adf_test(
    series: MonthlySeries,
    model: DeterministicTerms = DeterministicTerms.CONSTANT,
    max_lags: int = DEFAULT_ADF_MAX_LAGS,
    alpha: float = 0.05,
) -> AdfResult:
    """Augmented Dickey-Fuller unit-root test with AIC lag selection.

    The candidate grid is trimmed to lags whose fit is feasible on the
    common comparison sample; at least the k = 0 regression must fit, or
    InsufficientData is raised.
    """
    level = alpha_to_level(alpha)
    model = DeterministicTerms(model)
    if max_lags < 0:
        raise DomainError(f"max_lags must be >= 0, got {max_lags}")
    n = len(series)
    if n < max_lags + _ADF_MARGIN:
        raise InsufficientData(
            f"ADF with max_lags={max_lags} needs at least "
            f"{max_lags + _ADF_MARGIN} observations, got {n}"
        )
    y = series.values
    dy = np.diff(y)
    ntrend = {
        DeterministicTerms.NONE: 0,
        DeterministicTerms.CONSTANT: 1,
        DeterministicTerms.CONSTANT_TREND: 2,
    }[model]
    common_rows = n - 1 - max_lags
    # Largest k whose regression still has a residual dof on the common rows.
    grid_max = min(max_lags, common_rows - ntrend - 2)
    if grid_max < 0:
        raise InsufficientData(
            f"{n} observations cannot support an ADF regression with "
            f"model={model.value}"
        )

    best_k = 0
    best_aic = math.inf
    for k in range(grid_max + 1):
        # Trim every candidate to the same rows so AICs are comparable.
        offset = max_lags - k
        design_full, target_full = _adf_design(y, dy, k, model)
        design = DesignMatrix(
            design_full.values[offset:], design_full.col_labels
        )
        target = target_full[offset:]
        fit = ols_fit(design, target)
        t_common = len(target)
        rss = max(fit.rss, 1e-300)
        aic = t_common * math.log(rss / t_common) + 2 * design.cols
        if aic < best_aic:
            best_aic = aic
            best_k = k

    design, target = _adf_design(y, dy, best_k, model)
    fit = ols_fit(design, target)
    statistic = fit.tstat("level[-1]")
    nobs = len(target)
    critical = df_critical_row(model, nobs)
    verdict = (
        UnitRootVerdict.STATIONARY
        if statistic < critical[level]
        else UnitRootVerdict.HAS_UNIT_ROOT
    )
    return AdfResult(
        series_name=series.name,
        model=model,
        lags_used=best_k,
        nobs=nobs,
        statistic=statistic,
        critical_values=critical,
        alpha=alpha,
        verdict=verdict,
    )


def _var_design(pair: AlignedPair, order: int) -> Tuple[DesignMatrix, np.ndarray, np.ndarray]:
    """Shared VAR regressor stack [1, rd lags 1..p, lgd lags 1..p]."""
    rd = pair.rd.values
    lgd = pair.lgd.values
    t_full = len(rd)
    rows = t_full - order
    cols = [np.ones(rows)]
    names = ["const"]
    for j in range(1, order + 1):
        cols.append(rd[order - j : t_full - j])
        names.append(f"rd[-{j}]")
    for j in range(1, order + 1):
        cols.append(lgd[order - j : t_full - j])
        names.append(f"lgd[-{j}]")
    design = DesignMatrix(np.column_stack(cols), tuple(names))
    return design, rd[order:], lgd[order:]


def _check_var_size(t_full: int, order: int) -> None:
    if order < 1:
        raise DomainError(f"lag order must be >= 1, got {order}")
    if t_full < 2 * order + 11:
        raise InsufficientData(
            f"lag order {order} needs at least {2 * order + 11} joint "
            f"observations, got {t_full}"
        )
    d2 = (t_full - order) - (2 * order + 1)
    if d2 < 1:
        raise InsufficientData(
            f"lag order {order} leaves {d2} residual dof on {t_full} observations"
        )


def fit_var(pair: AlignedPair, order: int) -> VarModel:
    """Fit a bivariate VAR(p) equation by equation."""
    _check_var_size(len(pair), order)
    design, y_rd, y_lgd = _var_design(pair, order)
    return VarModel(
        order=order,
        t_eff=len(pair) - order,
        rd_equation=ols_fit(design, y_rd),
        lgd_equation=ols_fit(design, y_lgd),
    )


def _granger_f(
    cause: np.ndarray, effect: np.ndarray, lag: int
) -> Tuple[float, float, float, int, int]:
    """F statistic of 'cause lags add explanatory power for effect'.

    Returns (f, rss_restricted, rss_unrestricted, d1, d2).  Restricted and
    unrestricted fits share the identical row set.
    """
    t_full = len(effect)
    rows = t_full - lag
    cols_r = [np.ones(rows)]
    names_r = ["const"]
    for j in range(1, lag + 1):
        cols_r.append(effect[lag - j : t_full - j])
        names_r.append(f"effect[-{j}]")
    cols_u = list(cols_r)
    names_u = list(names_r)
    for j in range(1, lag + 1):
        cols_u.append(cause[lag - j : t_full - j])
        names_u.append(f"cause[-{j}]")
    target = effect[lag:]
    fit_u = ols_fit(DesignMatrix(np.column_stack(cols_u), tuple(names_u)), target)
    fit_r = ols_fit(DesignMatrix(np.column_stack(cols_r), tuple(names_r)), target)
    d1 = lag
    d2 = rows - (2 * lag + 1)
    num = (fit_r.rss - fit_u.rss) / d1
    den = fit_u.rss / d2
    if den == 0.0:
        # Perfect unrestricted fit: either the cause added nothing (both
        # RSS zero) or it explains the last residual exactly.
        f_stat = 0.0 if num <= 0.0 else math.inf
    else:
        f_stat = max(num, 0.0) / den
    return f_stat, fit_r.rss, fit_u.rss, d1, d2


def _resolve_direction(
    pair: AlignedPair, cause: str
) -> Tuple[MonthlySeries, MonthlySeries, str, str]:
    """Map a cause label ('rd'/'lgd' or a series name) to (cause, effect)."""
    if cause == "rd" or cause == pair.rd.name:
        return pair.rd, pair.lgd, pair.rd.name, pair.lgd.name
    if cause == "lgd" or cause == pair.lgd.name:
        return pair.lgd, pair.rd, pair.lgd.name, pair.rd.name
    raise DomainError(
        f"cause must be 'rd', 'lgd', {pair.rd.name!r}, or {pair.lgd.name!r}; "
        f"got {cause!r}"
    )


def _normalize_assumed(pair: AlignedPair, assume_stationary: Iterable[str]) -> set:
    roles = set()
    for item in assume_stationary:
        if item in ("rd", pair.rd.name):
            roles.add("rd")
        elif item in ("lgd", pair.lgd.name):
            roles.add("lgd")
        elif item == "both":
            roles.update(("rd", "lgd"))
        else:
            raise DomainError(
                f"assume_stationary entries must name a series of the pair; "
                f"got {item!r}"
            )
    return roles


def _stationarity_gate(
    pair: AlignedPair, alpha: float, assume_stationary: Iterable[str]
) -> Dict[str, Optional[str]]:
    """ADF both series; returns {role: failure reason or None}."""
    assumed = _normalize_assumed(pair, assume_stationary)
    outcome: Dict[str, Optional[str]] = {}
    gate_lags = min(DEFAULT_ADF_MAX_LAGS, len(pair) - _ADF_MARGIN)
    for role, series in (("rd", pair.rd), ("lgd", pair.lgd)):
        if role in assumed:
            outcome[role] = None
            continue
        try:
            result = adf_test(
                series,
                model=DeterministicTerms.CONSTANT,
                max_lags=max(gate_lags, 0),
                alpha=alpha,
            )
        except (InsufficientData, RankDeficient) as exc:
            outcome[role] = f"stationarity gate could not run on {series.name}: {exc}"
            continue
        if result.verdict is UnitRootVerdict.HAS_UNIT_ROOT:
            outcome[role] = (
                f"{series.name} has a unit root at alpha={alpha} "
                f"(ADF statistic {result.statistic:.3f} vs critical "
                f"{result.critical_values[alpha_to_level(alpha)]:.2f})"
            )
        else:
            outcome[role] = None
    return outcome


def granger_test(
    pair: AlignedPair,
    cause: str,
    lag: int,
    alpha: float = 0.05,
    assume_stationary: Iterable[str] = (),
) -> GrangerResult:
    """Directional Granger causality F test at one lag order.

    Raises NonStationaryInput when either series fails the ADF gate and is
    not listed in ``assume_stationary`` ('rd', 'lgd', a series name, or
    'both').
    """
    alpha_to_level(alpha)
    cause_series, effect_series, cause_name, effect_name = _resolve_direction(
        pair, cause
    )
    _check_var_size(len(pair), lag)
    gate = _stationarity_gate(pair, alpha, assume_stationary)
    for role in ("rd", "lgd"):
        if gate[role] is not None:
            raise NonStationaryInput(gate[role])
    f_stat, rss_r, rss_u, d1, d2 = _granger_f(
        cause_series.values, effect_series.values, lag
    )
    p_value = 1.0 - f_cdf(f_stat, d1, d2) if math.isfinite(f_stat) else 0.0
    verdict = (
        CausalityVerdict.CAUSES
        if p_value < alpha
        else CausalityVerdict.DOES_NOT_CAUSE
    )
    return GrangerResult(
        cause=cause_name,
        effect=effect_name,
        lag=lag,
        t_eff=len(pair) - lag,
        f_statistic=f_stat,
        d1=d1,
        d2=d2,
        p_value=p_value,
        alpha=alpha,
        verdict=verdict,
        rss_restricted=rss_r,
        rss_unrestricted=rss_u,
    )


def granger_grid(
    pair: AlignedPair,
    max_lag: int,
    alpha: float = 0.05,
    assume_stationary: Iterable[str] = (),
) -> List[GrangerCell]:
    """Both causal directions at every lag 1..max_lag.

    Never raises on individual cells: entries that cannot be computed
    (too few observations, failed stationarity gate, collinear design)
    carry a skip reason instead.  Ordering is direction-major (rd->lgd
    block first), lag-minor.
    """
    alpha_to_level(alpha)
    if max_lag < 1:
        raise DomainError(f"max_lag must be >= 1, got {max_lag}")
    gate = _stationarity_gate(pair, alpha, assume_stationary)
    cells: List[GrangerCell] = []
    directions = (
        ("rd", pair.rd, pair.lgd),
        ("lgd", pair.lgd, pair.rd),
    )
    for cause_role, cause_series, effect_series in directions:
        effect_role = "lgd" if cause_role == "rd" else "rd"
        gate_reason = gate[cause_role] or gate[effect_role]
        for lag in range(1, max_lag + 1):
            if gate_reason is not None:
                cells.append(
                    GrangerCell(
                        cause=cause_series.name,
                        effect=effect_series.name,
                        lag=lag,
                        result=None,
                        skip_reason=gate_reason,
                    )
                )
                continue
            try:
                _check_var_size(len(pair), lag)
                f_stat, rss_r, rss_u, d1, d2 = _granger_f(
                    cause_series.values, effect_series.values, lag
                )
            except (InsufficientData, RankDeficient) as exc:
                cells.append(
                    GrangerCell(
                        cause=cause_series.name,
                        effect=effect_series.name,
                        lag=lag,
                        result=None,
                        skip_reason=str(exc),
                    )
                )
                continue
            p_value = 1.0 - f_cdf(f_stat, d1, d2) if math.isfinite(f_stat) else 0.0
            verdict = (
                CausalityVerdict.CAUSES
                if p_value < alpha
                else CausalityVerdict.DOES_NOT_CAUSE
            )
            cells.append(
                GrangerCell(
                    cause=cause_series.name,
                    effect=effect_series.name,
                    lag=lag,
                    result=GrangerResult(
                        cause=cause_series.name,
                        effect=effect_series.name,
                        lag=lag,
                        t_eff=len(pair) - lag,
                        f_statistic=f_stat,
                        d1=d1,
                        d2=d2,
                        p_value=p_value,
                        alpha=alpha,
                        verdict=verdict,
                        rss_restricted=rss_r,
                        rss_unrestricted=rss_u,
                    ),
                    skip_reason=None,
                )
            )
    return cells
