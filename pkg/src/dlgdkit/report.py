"""End-to-end analysis pipeline and report rendering.

``run_analysis`` strings the whole methodology together on an aligned
LGD/RD pair: correlation with a t-based significance note, ADF verdicts
for both series, the bidirectional Granger grid, downturn-window
detection, the conservative assessments (pooled across windows and per
window), and the final capped downturn-LGD values.

Rendering is deterministic by construction: the JSON report has a fixed
key order, carries a schema version, and contains no timestamps or
environment echoes, so identical inputs give identical bytes.  The plot
emitter writes tab-separated files with a '#'-prefixed header line.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from dlgdkit.dist import DeterministicTerms, alpha_to_level, t_cdf
from dlgdkit.downturn import (
    DownturnAssessment,
    DownturnLgd,
    DownturnWindow,
    Variant,
    assess,
    detect_downturns,
    downturn_lgd,
    union_months,
)
from dlgdkit.econtests import (
    DEFAULT_ADF_MAX_LAGS,
    AdfResult,
    GrangerCell,
    adf_test,
    granger_grid,
)
from dlgdkit.errors import (
    DegenerateSeries,
    DomainError,
    InsufficientData,
    RankDeficient,
)
from dlgdkit.ingest import atomic_write_text
from dlgdkit.series import AlignedPair, month_span, pearson, summary

SCHEMA_VERSION = 1

_VARIANT_CHOICES = ("strict", "lenient", "both")


@dataclass(frozen=True)
class AnalysisParams:
    """Knobs of one analysis run; defaults follow the methodology."""

    alpha: float = 0.05
    min_window: int = 6
    max_lag: int = 8
    variant: str = "both"
    assume_stationary: Tuple[str, ...] = ()

    def __post_init__(self):
        alpha_to_level(self.alpha)
        if self.min_window < 1:
            raise DomainError(f"min_window must be >= 1, got {self.min_window}")
        if self.max_lag < 1:
            raise DomainError(f"max_lag must be >= 1, got {self.max_lag}")
        if self.variant not in _VARIANT_CHOICES:
            raise DomainError(
                f"variant must be one of {_VARIANT_CHOICES}, got {self.variant!r}"
            )

    @property
    def variants(self) -> Tuple[Variant, ...]:
        if self.variant == "both":
            return (Variant.STRICT, Variant.LENIENT)
        return (Variant(self.variant),)


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    t_statistic: float
    p_value: float
    n: int


@dataclass(frozen=True)
class AnalysisResult:
    """Everything computed in one run, pre-rendering."""

    pair: AlignedPair
    params: AnalysisParams
    correlation: CorrelationResult
    adf_rd: Optional[AdfResult]
    adf_lgd: Optional[AdfResult]
    granger_cells: List[GrangerCell]
    rd_mean: float
    rd_std: float
    threshold: float
    windows: List[DownturnWindow]
    pooled_assessments: Dict[Variant, DownturnAssessment]
    window_assessments: List[Tuple[DownturnWindow, Dict[Variant, DownturnAssessment]]]
    elgd: float
    finals: Dict[Variant, DownturnLgd]
    warnings: List[str]


def _correlate(pair: AlignedPair) -> CorrelationResult:
    r = pearson(pair)
    n = len(pair)
    if abs(r) >= 1.0:
        t_stat = math.inf if r > 0 else -math.inf
        p_value = 0.0
    else:
        t_stat = r * math.sqrt((n - 2) / (1.0 - r * r))
        p_value = 2.0 * (1.0 - t_cdf(abs(t_stat), n - 2))
    return CorrelationResult(r=r, t_statistic=t_stat, p_value=p_value, n=n)


def run_analysis(pair: AlignedPair, params: AnalysisParams) -> AnalysisResult:
    """Run the full methodology on an aligned pair.

    Raises on unrecoverable analysis errors (constant RD, non-positive
    reference floor for a requested variant); everything merely
    warning-worthy -- skipped Granger cells, stationarity overrides, no
    downturn detected, capped final values -- lands in ``warnings``.
    """
    warnings: List[str] = []
    correlation = _correlate(pair)

    adf_results: Dict[str, Optional[AdfResult]] = {}
    gate_lags = min(DEFAULT_ADF_MAX_LAGS, max(len(pair) - 10, 0))
    for role, series in (("rd", pair.rd), ("lgd", pair.lgd)):
        try:
            adf_results[role] = adf_test(
                series,
                model=DeterministicTerms.CONSTANT,
                max_lags=gate_lags,
                alpha=params.alpha,
            )
        except (InsufficientData, RankDeficient) as exc:
            adf_results[role] = None
            warnings.append(f"adf skipped for {series.name}: {exc}")

    if params.assume_stationary:
        warnings.append(
            "stationarity override in effect for: "
            + ", ".join(params.assume_stationary)
        )
    cells = granger_grid(
        pair,
        max_lag=params.max_lag,
        alpha=params.alpha,
        assume_stationary=params.assume_stationary,
    )
    for cell in cells:
        if not cell.computed:
            warnings.append(
                f"granger {cell.cause}->{cell.effect} lag {cell.lag} "
                f"skipped: {cell.skip_reason}"
            )

    rd_stats = summary(pair.rd)
    windows = detect_downturns(pair.rd, min_window=params.min_window)
    threshold = rd_stats.mean + rd_stats.std

    pooled: Dict[Variant, DownturnAssessment] = {}
    per_window: List[Tuple[DownturnWindow, Dict[Variant, DownturnAssessment]]] = []
    finals: Dict[Variant, DownturnLgd] = {}
    elgd = summary(pair.lgd).weighted_mean
    if not windows:
        warnings.append(
            f"no downturn window detected (threshold {threshold:.6f}, "
            f"min {params.min_window} months); no add-on can be computed"
        )
    else:
        months = union_months(windows)
        for variant in params.variants:
            pooled[variant] = assess(pair, months, variant)
        for window in windows:
            entry: Dict[Variant, DownturnAssessment] = {}
            for variant in params.variants:
                try:
                    entry[variant] = assess(pair, window.months, variant)
                except DegenerateSeries as exc:
                    warnings.append(
                        f"window {window.start}..{window.end} not assessed "
                        f"({variant.value}): {exc}"
                    )
            per_window.append((window, entry))
        for variant, assessment in pooled.items():
            final = downturn_lgd(assessment, elgd)
            finals[variant] = final
            if final.capped:
                warnings.append(
                    f"{variant.designation} capped at 1.0 "
                    f"(ELGD {elgd:.6f} + add-on {assessment.addon_absolute:.6f})"
                )

    return AnalysisResult(
        pair=pair,
        params=params,
        correlation=correlation,
        adf_rd=adf_results["rd"],
        adf_lgd=adf_results["lgd"],
        granger_cells=cells,
        rd_mean=rd_stats.mean,
        rd_std=rd_stats.std,
        threshold=threshold,
        windows=windows,
        pooled_assessments=pooled,
        window_assessments=per_window,
        elgd=elgd,
        finals=finals,
        warnings=warnings,
    )


# --------------------------------------------------------------------------
# JSON rendering
# --------------------------------------------------------------------------


def _num(x: float):
    """JSON-safe number: non-finite floats become strings."""
    x = float(x)
    if math.isfinite(x):
        return x
    return repr(x)


def _series_echo(series) -> dict:
    return {
        "name": series.name,
        "kind": series.kind,
        "months": len(series),
        "start": str(series.start),
        "end": str(series.end),
        "weighted": series.weights is not None,
    }


def _adf_dict(result: Optional[AdfResult]) -> Optional[dict]:
    if result is None:
        return None
    return {
        "series": result.series_name,
        "model": result.model.value,
        "lags_used": result.lags_used,
        "nobs": result.nobs,
        "statistic": _num(result.statistic),
        "critical_values": {
            str(level): _num(value)
            for level, value in sorted(result.critical_values.items())
        },
        "alpha": result.alpha,
        "verdict": result.verdict.value,
    }


def _granger_dict(cell: GrangerCell) -> dict:
    base = {
        "cause": cell.cause,
        "effect": cell.effect,
        "lag": cell.lag,
        "computed": cell.computed,
    }
    if cell.result is None:
        base["skip_reason"] = cell.skip_reason
        return base
    r = cell.result
    base.update(
        {
            "f_statistic": _num(r.f_statistic),
            "d1": r.d1,
            "d2": r.d2,
            "p_value": _num(r.p_value),
            "verdict": r.verdict.value,
            "rss_restricted": _num(r.rss_restricted),
            "rss_unrestricted": _num(r.rss_unrestricted),
        }
    )
    return base


def _assessment_dict(label: str, assessment: DownturnAssessment) -> dict:
    return {
        "variant": assessment.variant.value,
        "designation": assessment.variant.designation,
        "window": label,
        "downturn_months": assessment.downturn_stats.n,
        "reference_period": assessment.reference_stats.tag.value,
        "reference_months": assessment.reference_stats.n,
        "downturn_lgd_mean": _num(assessment.downturn_stats.weighted_mean),
        "downturn_lgd_std": _num(assessment.downturn_stats.std),
        "reference_lgd_mean": _num(assessment.reference_stats.weighted_mean),
        "reference_lgd_std": _num(assessment.reference_stats.std),
        "numerator": _num(assessment.numerator),
        "denominator": _num(assessment.denominator),
        "ratio": _num(assessment.ratio),
        "relative_uplift": _num(assessment.relative_uplift),
        "base_elgd": _num(assessment.base_elgd),
        "addon_absolute": _num(assessment.addon_absolute),
        "formula": assessment.formula,
    }


def build_report(result: AnalysisResult) -> dict:
    """The JSON-ready report dict, with a stable key order throughout."""
    params = result.params
    variants = result.params.variants
    finals = {}
    for variant in variants:
        final = result.finals.get(variant)
        finals[variant.value] = (
            None
            if final is None
            else {
                "designation": variant.designation,
                "elgd": _num(final.elgd),
                "addon": _num(final.addon),
                "value": _num(final.value),
                "capped": final.capped,
            }
        )
    return {
        "schema_version": SCHEMA_VERSION,
        "inputs": {
            "rd": _series_echo(result.pair.rd),
            "lgd": _series_echo(result.pair.lgd),
            "aligned_months": len(result.pair),
            "aligned_span": month_span(result.pair.months),
        },
        "parameters": {
            "alpha": params.alpha,
            "min_window": params.min_window,
            "max_lag": params.max_lag,
            "variant": params.variant,
            "assume_stationary": list(params.assume_stationary),
        },
        "correlation": {
            "pearson_r": _num(result.correlation.r),
            "t_statistic": _num(result.correlation.t_statistic),
            "p_value": _num(result.correlation.p_value),
            "n": result.correlation.n,
        },
        "stationarity": {
            "rd": _adf_dict(result.adf_rd),
            "lgd": _adf_dict(result.adf_lgd),
        },
        "granger": [_granger_dict(cell) for cell in result.granger_cells],
        "downturn": {
            "rd_mean": _num(result.rd_mean),
            "rd_std": _num(result.rd_std),
            "threshold": _num(result.threshold),
            "min_window": params.min_window,
            "windows": [
                {
                    "start": str(w.start),
                    "end": str(w.end),
                    "months": len(w),
                    "peak_rd": _num(w.peak_rd),
                }
                for w in result.windows
            ],
        },
        "assessments": (
            [
                _assessment_dict("pooled", result.pooled_assessments[variant])
                for variant in variants
                if variant in result.pooled_assessments
            ]
            + [
                _assessment_dict(f"{window.start}..{window.end}", entry[variant])
                for window, entry in result.window_assessments
                for variant in variants
                if variant in entry
            ]
        ),
        "downturn_lgd": {
            "elgd": _num(result.elgd),
            **finals,
        },
        "warnings": list(result.warnings),
    }


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


# --------------------------------------------------------------------------
# text rendering
# --------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return f"{x:.6f}"


def render_text(report: dict) -> str:
    """A compact human-readable view of the same report."""
    lines: List[str] = []
    push = lines.append
    inputs = report["inputs"]
    push("downturn LGD analysis")
    push("=====================")
    push(
        f"inputs: rd={inputs['rd']['name']} lgd={inputs['lgd']['name']} "
        f"({inputs['aligned_months']} aligned months, {inputs['aligned_span']})"
    )
    corr = report["correlation"]
    push(
        f"correlation: r={_fmt(corr['pearson_r'])} "
        f"t={_fmt(corr['t_statistic'])} p={_fmt(corr['p_value'])}"
    )
    push("")
    push("stationarity (ADF)")
    for role in ("rd", "lgd"):
        entry = report["stationarity"][role]
        if entry is None:
            push(f"  {role}: not run")
            continue
        cvs = entry["critical_values"]
        push(
            f"  {role} ({entry['series']}): stat={_fmt(entry['statistic'])} "
            f"lags={entry['lags_used']} cv5%={_fmt(cvs['5'])} -> {entry['verdict']}"
        )
    push("")
    push("granger grid")
    for cell in report["granger"]:
        head = f"  {cell['cause']} -> {cell['effect']} @ lag {cell['lag']}:"
        if not cell["computed"]:
            push(f"{head} skipped ({cell['skip_reason']})")
        else:
            push(
                f"{head} F={_fmt(cell['f_statistic'])} "
                f"p={_fmt(cell['p_value'])} -> {cell['verdict']}"
            )
    push("")
    downturn = report["downturn"]
    push(
        f"downturn: threshold={_fmt(downturn['threshold'])} "
        f"(mean {_fmt(downturn['rd_mean'])} + std {_fmt(downturn['rd_std'])}), "
        f"min window {downturn['min_window']}"
    )
    if not downturn["windows"]:
        push("  no window detected")
    for w in downturn["windows"]:
        push(f"  window {w['start']}..{w['end']} ({w['months']} months, peak {_fmt(w['peak_rd'])})")
    push("")
    for entry in report["assessments"]:
        push(
            f"{entry['designation']} ({entry['variant']}, {entry['window']}): "
            f"ratio={_fmt(entry['ratio'])} uplift={_fmt(entry['relative_uplift'])} "
            f"-> {entry['formula']}"
        )
    final = report["downturn_lgd"]
    push("")
    push(f"ELGD (whole period, weighted): {_fmt(final['elgd'])}")
    for key in ("strict", "lenient"):
        if key in final and final[key] is not None:
            entry = final[key]
            cap = " (capped)" if entry["capped"] else ""
            push(
                f"  {entry['designation']}: {_fmt(entry['value'])} "
                f"= ELGD + {_fmt(entry['addon'])}{cap}"
            )
    if report["warnings"]:
        push("")
        push("warnings:")
        for warning in report["warnings"]:
            push(f"  - {warning}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# plot data
# --------------------------------------------------------------------------


def emit_plot_data(
    result: AnalysisResult, out_dir: Union[str, Path]
) -> List[Path]:
    """Write plot-ready TSVs; returns the written paths.

    series.tsv    month, rd, lgd
    downturn.tsv  month, rd, threshold, in_window flag
    dlgd.tsv      month, lgd, elgd, dlgd1, dlgd2 (columns empty when the
                  variant was not computed)
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:  # pragma: no cover - depends on filesystem state
        raise DomainError(f"cannot create {out_dir}: {exc}") from None
    pair = result.pair
    written: List[Path] = []

    lines = ["# month\trd\tlgd"]
    for month, rd_v, lgd_v in zip(pair.months, pair.rd.values, pair.lgd.values):
        lines.append(f"{month}\t{float(rd_v)!r}\t{float(lgd_v)!r}")
    series_path = out_dir / "series.tsv"
    atomic_write_text(series_path, "\n".join(lines) + "\n")
    written.append(series_path)

    in_window = set()
    for window in result.windows:
        in_window.update(window.months)
    lines = ["# month\trd\tthreshold\tin_window"]
    for month, rd_v in zip(pair.months, pair.rd.values):
        flag = 1 if month in in_window else 0
        lines.append(
            f"{month}\t{float(rd_v)!r}\t{float(result.threshold)!r}\t{flag}"
        )
    downturn_path = out_dir / "downturn.tsv"
    atomic_write_text(downturn_path, "\n".join(lines) + "\n")
    written.append(downturn_path)

    strict_final = result.finals.get(Variant.STRICT)
    lenient_final = result.finals.get(Variant.LENIENT)
    dlgd1 = "" if strict_final is None else repr(float(strict_final.value))
    dlgd2 = "" if lenient_final is None else repr(float(lenient_final.value))
    lines = ["# month\tlgd\telgd\tdlgd1\tdlgd2"]
    for month, lgd_v in zip(pair.months, pair.lgd.values):
        lines.append(
            f"{month}\t{float(lgd_v)!r}\t{float(result.elgd)!r}\t{dlgd1}\t{dlgd2}"
        )
    dlgd_path = out_dir / "dlgd.tsv"
    atomic_write_text(dlgd_path, "\n".join(lines) + "\n")
    written.append(dlgd_path)
    return written
