"""Command-line interface.

Three subcommands::

    dlgd analyze    full pipeline on two series CSVs -> JSON/text report
    dlgd fetch-bcb  pull a monthly SGS series into the exchange CSV format
    dlgd synth      seeded synthetic series from a JSON spec

Exit codes: 0 success; 2 usage, input, or ingest problems; 3 analysis
failures on valid inputs.  Every failure prints a one-line diagnostic to
stderr.  All file output is written atomically.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from dlgdkit import __version__
from dlgdkit.errors import DlgdError
from dlgdkit.ingest import (
    atomic_write_text,
    fetch_bcb_series,
    read_series_csv,
    render_series_csv,
    write_series_csv,
)
from dlgdkit.report import (
    AnalysisParams,
    build_report,
    emit_plot_data,
    render_json,
    render_text,
    run_analysis,
)
from dlgdkit.series import AlignedPair, MonthIndex, MonthlySeries, align
from dlgdkit.synth import SynthSpec, generate_with_info

#: Exit code for bad usage and bad input data.
EXIT_INPUT = 2
#: Exit code for analysis failures on well-formed inputs.
EXIT_ANALYSIS = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dlgd",
        description="Downturn-LGD analytics on monthly LGD/RD series.",
    )
    parser.add_argument("--version", action="version", version=f"dlgd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser(
        "analyze", help="run the full methodology on two series CSVs"
    )
    analyze.add_argument("--lgd", required=True, help="LGD series CSV")
    analyze.add_argument("--rd", required=True, help="default-rate series CSV")
    analyze.add_argument(
        "--min-window",
        type=int,
        default=6,
        help="minimum downturn length in months (default 6)",
    )
    analyze.add_argument(
        "--max-lag",
        type=int,
        default=8,
        help="largest Granger lag order to test (default 8)",
    )
    analyze.add_argument(
        "--alpha",
        type=float,
        default=0.05,
        help="significance level: 0.01, 0.05, or 0.10 (default 0.05)",
    )
    analyze.add_argument(
        "--variant",
        choices=("strict", "lenient", "both"),
        default="both",
        help="which reference period to assess against (default both)",
    )
    analyze.add_argument(
        "--assume-stationary",
        choices=("lgd", "rd", "both"),
        default=None,
        help="waive the ADF gate for a series the caller knows is stationary",
    )
    analyze.add_argument(
        "--as-percent",
        choices=("lgd", "rd", "both"),
        default=None,
        help="treat the given input file(s) as percent regardless of header",
    )
    analyze.add_argument("--out", default=None, help="report path (default stdout)")
    analyze.add_argument(
        "--plot-data",
        default=None,
        metavar="DIR",
        help="also write plot-ready TSVs into DIR",
    )
    analyze.add_argument(
        "--format",
        choices=("json", "text"),
        default="json",
        help="report format (default json)",
    )

    fetch = sub.add_parser(
        "fetch-bcb", help="fetch a monthly SGS series into a CSV"
    )
    fetch.add_argument(
        "--series", required=True, type=int, help="numeric SGS series code"
    )
    fetch.add_argument("--start", required=True, help="first month, YYYY-MM")
    fetch.add_argument("--end", required=True, help="last month, YYYY-MM")
    fetch.add_argument("--out", required=True, help="output CSV path")
    fetch.add_argument(
        "--endpoint",
        default=None,
        help="override the service base URL (also: DLGD_BCB_ENDPOINT)",
    )

    synth = sub.add_parser(
        "synth", help="generate seeded synthetic series from a JSON spec"
    )
    synth.add_argument("--spec", required=True, help="spec JSON path")
    synth.add_argument("--out", required=True, help="output directory")
    return parser


def _fail(message: str, code: int) -> int:
    print(f"dlgd: error: {message}", file=sys.stderr)
    return code


def _load_pair(args) -> AlignedPair:
    def unit_for(role: str) -> Optional[str]:
        if args.as_percent in (role, "both"):
            return "percent"
        return None

    lgd = read_series_csv(args.lgd, force_unit=unit_for("lgd"))
    rd = read_series_csv(args.rd, force_unit=unit_for("rd"))
    for flag, series, expected in (("--lgd", lgd, "lgd"), ("--rd", rd, "rd")):
        if series.kind != expected:
            print(
                f"dlgd: note: {flag} file {series.name!r} is declared "
                f"kind={series.kind}",
                file=sys.stderr,
            )
    return align(rd, lgd)


def cmd_analyze(args) -> int:
    # Parameter and ingest problems are input errors (exit 2); only
    # failures of the statistics themselves map to exit 3.
    try:
        params = AnalysisParams(
            alpha=args.alpha,
            min_window=args.min_window,
            max_lag=args.max_lag,
            variant=args.variant,
            assume_stationary=(
                () if args.assume_stationary is None else (args.assume_stationary,)
            ),
        )
        pair = _load_pair(args)
    except DlgdError as exc:
        return _fail(str(exc), EXIT_INPUT)
    try:
        result = run_analysis(pair, params)
        report = build_report(result)
        rendered = render_json(report) if args.format == "json" else render_text(report)
        if args.plot_data is not None:
            emit_plot_data(result, args.plot_data)
    except DlgdError as exc:
        return _fail(str(exc), EXIT_ANALYSIS)
    if args.out is None:
        sys.stdout.write(rendered)
    else:
        try:
            atomic_write_text(args.out, rendered)
        except DlgdError as exc:
            return _fail(str(exc), EXIT_INPUT)
    return 0


def cmd_fetch_bcb(args) -> int:
    try:
        start = MonthIndex.parse(args.start)
        end = MonthIndex.parse(args.end)
        series = fetch_bcb_series(
            args.series, start, end, endpoint=args.endpoint
        )
        expected = end.ordinal() - start.ordinal() + 1
        if len(series) != expected:
            print(
                f"dlgd: note: requested {expected} months, service returned "
                f"{len(series)} ({series.start}..{series.end})",
                file=sys.stderr,
            )
        write_series_csv(series, args.out)
    except DlgdError as exc:
        return _fail(str(exc), EXIT_INPUT)
    print(f"wrote {len(series)} months to {args.out}", file=sys.stderr)
    return 0


def cmd_synth(args) -> int:
    try:
        spec_text = Path(args.spec).read_text(encoding="utf-8")
    except OSError as exc:
        return _fail(f"cannot read {args.spec}: {exc}", EXIT_INPUT)
    try:
        spec = SynthSpec.from_json(spec_text)
        if not spec.clamp_to_rate:
            return _fail(
                "CSV output stores rate series; set clamp_to_rate=true in the --spec JSON",
                EXIT_INPUT,
            )
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        generated, info = generate_with_info(spec)
        if isinstance(generated, MonthlySeries):
            outputs = [(out_dir / f"{generated.name}.csv", generated)]
        else:
            outputs = [
                (out_dir / "lgd.csv", generated.lgd),
                (out_dir / "rd.csv", generated.rd),
            ]
        for path, series in outputs:
            atomic_write_text(path, render_series_csv(series))
        for series_name, count in sorted(info.truncated.items()):
            if count:
                print(
                    f"dlgd: note: {count} {series_name} value(s) truncated "
                    f"into [0, 1]",
                    file=sys.stderr,
                )
    except OSError as exc:
        return _fail(str(exc), EXIT_INPUT)
    except DlgdError as exc:
        return _fail(str(exc), EXIT_INPUT)
    for path, _ in outputs:
        print(f"wrote {path}", file=sys.stderr)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "analyze":
        return cmd_analyze(args)
    if args.command == "fetch-bcb":
        return cmd_fetch_bcb(args)
    if args.command == "synth":
        return cmd_synth(args)
    raise AssertionError(f"unhandled command {args.command}")  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
