"""Downturn-LGD analytics toolkit.

Reproduces a conservative downturn-LGD methodology end to end: monthly
LGD and default-rate series, their correlation, unit-root (ADF) and
Granger-causality diagnostics, detection of economic-downturn windows,
and the additive downturn-LGD uplift with strict and lenient reference
periods.

The compute-heavy kernels are compiled (Cython) with a pure-Python
fallback selected at import; see ``dlgdkit._kernels.BACKEND``.
"""

from dlgdkit.downturn import (
    DownturnAssessment,
    DownturnLgd,
    DownturnWindow,
    Variant,
    assess,
    detect_downturns,
    downturn_lgd,
    exceedance_threshold,
    low_default_months,
    period_lgd_stats,
    union_months,
)
from dlgdkit.dist import (
    DeterministicTerms,
    alpha_to_level,
    df_critical,
    df_critical_row,
    f_cdf,
    t_cdf,
)
from dlgdkit.econtests import (
    AdfResult,
    CausalityVerdict,
    GrangerCell,
    GrangerResult,
    UnitRootVerdict,
    VarModel,
    adf_test,
    fit_var,
    granger_grid,
    granger_test,
)
from dlgdkit.errors import DlgdError
from dlgdkit.ingest import (
    fetch_bcb_series,
    read_series_csv,
    render_series_csv,
    write_series_csv,
)
from dlgdkit.regression import DesignMatrix, OlsFit, lagged_design, ols_fit
from dlgdkit.report import (
    AnalysisParams,
    AnalysisResult,
    build_report,
    emit_plot_data,
    render_json,
    render_text,
    run_analysis,
)
from dlgdkit.series import (
    AlignedPair,
    MonthIndex,
    MonthlySeries,
    SummaryStats,
    align,
    differenced,
    month_range,
    pearson,
    summary,
)
from dlgdkit.synth import SynthKind, SynthSpec, generate, generate_with_info

__version__ = "0.1.0"

__all__ = [
    "AdfResult",
    "AlignedPair",
    "AnalysisParams",
    "AnalysisResult",
    "CausalityVerdict",
    "DesignMatrix",
    "DeterministicTerms",
    "DlgdError",
    "DownturnAssessment",
    "DownturnLgd",
    "DownturnWindow",
    "GrangerCell",
    "GrangerResult",
    "MonthIndex",
    "MonthlySeries",
    "OlsFit",
    "SummaryStats",
    "SynthKind",
    "SynthSpec",
    "UnitRootVerdict",
    "VarModel",
    "Variant",
    "__version__",
    "adf_test",
    "align",
    "alpha_to_level",
    "assess",
    "build_report",
    "detect_downturns",
    "df_critical",
    "df_critical_row",
    "differenced",
    "downturn_lgd",
    "emit_plot_data",
    "exceedance_threshold",
    "f_cdf",
    "fetch_bcb_series",
    "fit_var",
    "generate",
    "generate_with_info",
    "granger_grid",
    "granger_test",
    "lagged_design",
    "low_default_months",
    "month_range",
    "ols_fit",
    "pearson",
    "period_lgd_stats",
    "read_series_csv",
    "render_json",
    "render_series_csv",
    "render_text",
    "run_analysis",
    "summary",
    "t_cdf",
    "union_months",
    "write_series_csv",
]
