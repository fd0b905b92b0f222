"""Series exchange format and remote ingestion.

CSV format
----------
Line 1 is a required sidecar header, line 2 the column header::

    # name=<label>, kind=<lgd|rd>, unit=<fraction|percent>
    month,value[,weight]
    2008-01,0.0297
    ...

Months are YYYY-MM and must advance one month per row.  Values are
decimals; with ``unit=percent`` they are divided by 100 on read.  The
optional weight column is all-or-nothing.  The format stores rate series
(fractions in [0, 1]); the writer refuses anything else, always emits
``unit=fraction``, and formats values at full precision, so writing and
re-reading is the identity on the format's domain.

Remote ingestion
----------------
``fetch_bcb_series`` pulls one monthly series from the Brazilian central
bank time-series service (SGS).  The wire format is a JSON array of
``{"data": "DD/MM/YYYY", "valor": "<percent>"}`` observations stamped on
the first of the month.  The payload is validated before any series is
built: non-monthly stamps raise FrequencyMismatch, out-of-order rows are
rejected (never sorted), and gaps raise GapInSeries.  Only transport
failures are retried; HTTP error statuses, including 5xx, surface
immediately as HttpError.
"""

from __future__ import annotations

import math
import os
import re
import tempfile
import time
from pathlib import Path
from typing import Optional, Tuple, Union

import requests

from dlgdkit.errors import (
    DomainError,
    FrequencyMismatch,
    GapInSeries,
    HttpError,
    IoError,
    ParseError,
    WireFormatError,
)
from dlgdkit.series import MonthIndex, MonthlySeries

_HEADER_RE = re.compile(
    r"^# name=(?P<name>.*), kind=(?P<kind>lgd|rd), unit=(?P<unit>fraction|percent)$"
)
_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")
_WIRE_DATE_RE = re.compile(r"^(\d{2})/(\d{2})/(\d{4})$")

DEFAULT_BCB_ENDPOINT = "https://api.bcb.gov.br"
ENDPOINT_ENV_VAR = "DLGD_BCB_ENDPOINT"


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------


def read_series_csv(
    path: Union[str, Path], force_unit: Optional[str] = None
) -> MonthlySeries:
    """Parse one series file; errors carry 1-based line numbers.

    ``force_unit`` overrides the declared unit ('fraction' or 'percent'),
    for files whose header is known to be wrong.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError(1, "file is empty")
    header = _HEADER_RE.match(lines[0])
    if header is None:
        raise ParseError(
            1, "expected '# name=<label>, kind=<lgd|rd>, unit=<fraction|percent>'"
        )
    name = header.group("name")
    kind = header.group("kind")
    unit = header.group("unit")
    if force_unit is not None:
        if force_unit not in ("fraction", "percent"):
            raise DomainError(f"force_unit must be 'fraction' or 'percent', got {force_unit!r}")
        unit = force_unit
    if len(lines) < 2:
        raise ParseError(2, "missing column header")
    if lines[1] == "month,value":
        has_weights = False
    elif lines[1] == "month,value,weight":
        has_weights = True
    else:
        raise ParseError(2, "expected 'month,value' or 'month,value,weight'")
    if len(lines) < 3:
        raise ParseError(3, "no data rows")
    months = []
    values = []
    weights = [] if has_weights else None
    for lineno, line in enumerate(lines[2:], start=3):
        fields = line.split(",")
        expected = 3 if has_weights else 2
        if len(fields) != expected:
            raise ParseError(lineno, f"expected {expected} fields, got {len(fields)}")
        m = _MONTH_RE.match(fields[0])
        if m is None:
            raise ParseError(lineno, f"month must be YYYY-MM, got {fields[0]!r}")
        year, month = int(m.group(1)), int(m.group(2))
        if not 1 <= month <= 12:
            raise ParseError(lineno, f"month {fields[0]!r} is out of range")
        try:
            value = float(fields[1])
        except ValueError:
            raise ParseError(lineno, f"value {fields[1]!r} is not a number") from None
        if not math.isfinite(value):
            raise ParseError(lineno, f"value {fields[1]!r} is not finite")
        if unit == "percent":
            value /= 100.0
        if not 0.0 <= value <= 1.0:
            raise DomainError(
                f"line {lineno}: rate value {value!r} outside [0, 1] "
                f"(declared unit: {unit})"
            )
        if has_weights:
            try:
                weight = float(fields[2])
            except ValueError:
                raise ParseError(lineno, f"weight {fields[2]!r} is not a number") from None
            if not math.isfinite(weight) or weight < 0.0:
                raise DomainError(
                    f"line {lineno}: weight {fields[2]!r} must be finite and >= 0"
                )
            weights.append(weight)
        months.append(MonthIndex(year, month))
        values.append(value)
    return MonthlySeries(
        name=name,
        months=tuple(months),
        values=values,
        weights=weights,
        is_rate=True,
        kind=kind,
    )


def render_series_csv(series: MonthlySeries) -> str:
    """The exact file content for a series, always in fraction units."""
    if not series.is_rate:
        raise DomainError(
            "the exchange format stores rate series; clamp or rescale first"
        )
    if series.kind is None:
        raise DomainError("series needs kind 'lgd' or 'rd' to be written")
    if "," in series.name or "\n" in series.name:
        raise DomainError("series name must not contain ',' or newlines")
    lines = [f"# name={series.name}, kind={series.kind}, unit=fraction"]
    if series.weights is None:
        lines.append("month,value")
        for month, value in zip(series.months, series.values):
            lines.append(f"{month},{float(value)!r}")
    else:
        lines.append("month,value,weight")
        for month, value, weight in zip(series.months, series.values, series.weights):
            lines.append(f"{month},{float(value)!r},{float(weight)!r}")
    return "\n".join(lines) + "\n"


def atomic_write_text(path: Union[str, Path], text: str) -> None:
    """Write via a temp file and rename, so readers never see partial files."""
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(
            dir=path.parent, prefix=f".{path.name}.", suffix=".tmp"
        )
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
                handle.write(text)
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from None


def write_series_csv(series: MonthlySeries, path: Union[str, Path]) -> None:
    """Atomically write a series in the exchange format."""
    atomic_write_text(path, render_series_csv(series))


# --------------------------------------------------------------------------
# BCB SGS wire client
# --------------------------------------------------------------------------


def _parse_wire_item(index: int, item) -> Tuple[MonthIndex, int, float]:
    if not isinstance(item, dict) or "data" not in item or "valor" not in item:
        raise WireFormatError(
            f"observation {index} must be an object with 'data' and 'valor'"
        )
    date_match = _WIRE_DATE_RE.match(str(item["data"]))
    if date_match is None:
        raise WireFormatError(
            f"observation {index}: date {item['data']!r} is not DD/MM/YYYY"
        )
    day, month, year = (int(g) for g in date_match.groups())
    if not 1 <= month <= 12:
        raise WireFormatError(f"observation {index}: month {month} out of range")
    try:
        percent = float(item["valor"])
    except (TypeError, ValueError):
        raise WireFormatError(
            f"observation {index}: valor {item['valor']!r} is not a number"
        ) from None
    if not math.isfinite(percent):
        raise WireFormatError(f"observation {index}: valor is not finite")
    return MonthIndex(year, month), day, percent / 100.0


def fetch_bcb_series(
    code: int,
    start: MonthIndex,
    end: MonthIndex,
    endpoint: Optional[str] = None,
    *,
    kind: str = "rd",
    name: Optional[str] = None,
    session: Optional[requests.Session] = None,
    max_retries: int = 3,
    backoff_base: float = 0.5,
    timeout: float = 30.0,
) -> MonthlySeries:
    """Fetch one monthly SGS series as a fraction-valued rate series.

    ``endpoint`` (or the DLGD_BCB_ENDPOINT environment variable) overrides
    the production base URL, which is how tests point the client at a
    local server.  Values arrive in percent and are divided by 100.
    """
    if code < 1:
        raise DomainError(f"series code must be a positive integer, got {code}")
    if end < start:
        raise DomainError(f"start {start} is after end {end}")
    base = (
        endpoint
        or os.environ.get(ENDPOINT_ENV_VAR)
        or DEFAULT_BCB_ENDPOINT
    ).rstrip("/")
    url = f"{base}/dados/serie/bcdata.sgs.{code}/dados"
    params = {
        "formato": "json",
        "dataInicial": f"01/{start.month:02d}/{start.year:04d}",
        "dataFinal": f"01/{end.month:02d}/{end.year:04d}",
    }
    get = session.get if session is not None else requests.get
    response = None
    for attempt in range(max_retries + 1):
        try:
            response = get(url, params=params, timeout=timeout)
            break
        except (requests.ConnectionError, requests.Timeout) as exc:
            if attempt == max_retries:
                raise HttpError(None, f"{exc} after {max_retries} retries") from None
            time.sleep(backoff_base * 2**attempt)
    if not 200 <= response.status_code < 300:
        raise HttpError(response.status_code)
    try:
        payload = response.json()
    except ValueError:
        raise WireFormatError("payload is not valid JSON") from None
    if not isinstance(payload, list):
        raise WireFormatError("payload must be a JSON array of observations")
    if not payload:
        raise WireFormatError("no observations returned for the requested range")
    parsed = [_parse_wire_item(i, item) for i, item in enumerate(payload)]
    for index, (month, day, _) in enumerate(parsed):
        if day != 1:
            raise FrequencyMismatch(
                f"observation {index} is stamped {day:02d}/{month.month:02d}/"
                f"{month.year} (not the first of a month); "
                f"series {code} does not look monthly"
            )
    ordinals = [month.ordinal() for month, _, _ in parsed]
    deltas = [b - a for a, b in zip(ordinals, ordinals[1:])]
    if any(d <= 0 for d in deltas):
        raise WireFormatError(
            "observations are out of order; refusing to sort remote data"
        )
    if any(d != 1 for d in deltas):
        if len(set(deltas)) == 1:
            raise FrequencyMismatch(
                f"observations arrive every {deltas[0]} months; "
                f"series {code} is not monthly"
            )
        raise GapInSeries(
            f"missing months inside the returned range for series {code}"
        )
    months = tuple(month for month, _, _ in parsed)
    if months[0] < start or end < months[-1]:
        raise WireFormatError(
            f"server returned {months[0]}..{months[-1]} for a request of "
            f"{start}..{end}"
        )
    return MonthlySeries(
        name=name or f"bcdata.sgs.{code}",
        months=months,
        values=[value for _, _, value in parsed],
        weights=None,
        is_rate=True,
        kind=kind,
    )
