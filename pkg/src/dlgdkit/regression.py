"""Ordinary least squares and lag-matrix construction.

The solver itself lives in the kernel layer (compiled QR or SVD
fallback); this module owns the statistical wrapper -- residuals, RSS,
degrees of freedom, coefficient standard errors, t statistics -- and the
construction of lagged design matrices used by the unit-root and
causality tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from dlgdkit import _kernels
from dlgdkit.errors import (
    DimensionMismatch,
    DomainError,
    InsufficientData,
    RankDeficient,
)


@dataclass(frozen=True)
class DesignMatrix:
    """A T x k regressor matrix with one label per column."""

    values: np.ndarray
    col_labels: Tuple[str, ...]

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise DimensionMismatch("design matrix must be two-dimensional")
        if values.shape[1] != len(self.col_labels):
            raise DimensionMismatch(
                f"{values.shape[1]} columns but {len(self.col_labels)} labels"
            )
        if values.shape[1] < 1:
            raise DimensionMismatch("design matrix needs at least one column")
        if not np.all(np.isfinite(values)):
            raise DomainError("design matrix entries must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "col_labels", tuple(self.col_labels))

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class OlsFit:
    """Coefficients and inference quantities from one OLS fit.

    ``tstats[i]`` is ``coefficients[i] / stderr[i]`` and is NaN when the
    standard error is zero (perfect fit).
    """

    coefficients: np.ndarray
    stderr: np.ndarray
    tstats: np.ndarray
    residuals: np.ndarray
    rss: float
    dof: int
    col_labels: Tuple[str, ...]

    def coefficient(self, label: str) -> float:
        return float(self.coefficients[self.col_labels.index(label)])

    def tstat(self, label: str) -> float:
        return float(self.tstats[self.col_labels.index(label)])


def ols_fit(design: DesignMatrix, y: Sequence[float]) -> OlsFit:
    """Fit y on the design columns by least squares.

    Requires at least one residual degree of freedom (T >= k + 1).  Raises
    RankDeficient when the columns are numerically dependent (pivot below
    1e-10 relative to the largest).  The RSS is computed from the returned
    coefficients, so ``rss == residuals @ residuals`` exactly.
    """
    yv = np.ascontiguousarray(y, dtype=np.float64)
    if yv.ndim != 1 or len(yv) != design.rows:
        raise DimensionMismatch(
            f"y has length {yv.shape[0] if yv.ndim == 1 else yv.shape}, "
            f"design has {design.rows} rows"
        )
    if not np.all(np.isfinite(yv)):
        raise DomainError("y must be finite")
    t, k = design.rows, design.cols
    if t < k + 1:
        raise InsufficientData(
            f"need at least {k + 1} observations for {k} regressors, got {t}"
        )
    beta, xtx_inv_diag, rank = _kernels.ols_solve(design.values, yv)
    if rank < k:
        raise RankDeficient(
            f"design matrix has numerical rank {rank} < {k} "
            f"(columns: {', '.join(design.col_labels)})"
        )
    residuals = yv - design.values @ beta
    rss = float(residuals @ residuals)
    dof = t - k
    s2 = rss / dof
    stderr = np.sqrt(s2 * xtx_inv_diag)
    tstats = np.full(k, np.nan)
    nonzero = stderr > 0.0
    tstats[nonzero] = beta[nonzero] / stderr[nonzero]
    residuals.setflags(write=False)
    stderr.setflags(write=False)
    tstats.setflags(write=False)
    beta = beta.copy()
    beta.setflags(write=False)
    return OlsFit(
        coefficients=beta,
        stderr=stderr,
        tstats=tstats,
        residuals=residuals,
        rss=rss,
        dof=dof,
        col_labels=design.col_labels,
    )


def lagged_design(
    values: Sequence[float],
    lags: int,
    include_const: bool = True,
    extra: Optional[Sequence[float]] = None,
    extra_lags: int = 0,
    labels: Tuple[str, str] = ("y", "x"),
) -> Tuple[DesignMatrix, np.ndarray]:
    """Regress a series on its own lags (and optionally another's).

    Row t of the design holds [1, values[t-1..t-lags], extra[t-1..t-extra_lags]]
    and the target is values[t]; rows start at max(lags, extra_lags) so every
    lag is observed.  Returns (design, target).
    """
    v = np.ascontiguousarray(values, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch("values must be one-dimensional")
    if lags < 1:
        raise DomainError(f"lags must be >= 1, got {lags}")
    ylab, xlab = labels
    cols = []
    names = []
    maxlag = lags
    ev = None
    if extra is not None:
        if extra_lags < 1:
            raise DomainError(f"extra_lags must be >= 1, got {extra_lags}")
        ev = np.ascontiguousarray(extra, dtype=np.float64)
        if ev.shape != v.shape:
            raise DimensionMismatch("extra series must match values in length")
        maxlag = max(lags, extra_lags)
    t_full = len(v)
    rows = t_full - maxlag
    if include_const:
        names.append("const")
    names += [f"{ylab}[-{j}]" for j in range(1, lags + 1)]
    if ev is not None:
        names += [f"{xlab}[-{j}]" for j in range(1, extra_lags + 1)]
    if rows < len(names) + 1:
        raise InsufficientData(
            f"{t_full} observations leave {max(rows, 0)} usable rows for "
            f"{len(names)} regressors"
        )
    if include_const:
        cols.append(np.ones(rows))
    for j in range(1, lags + 1):
        cols.append(v[maxlag - j : t_full - j])
    if ev is not None:
        for j in range(1, extra_lags + 1):
            cols.append(ev[maxlag - j : t_full - j])
    design = DesignMatrix(np.column_stack(cols), tuple(names))
    return design, v[maxlag:]
