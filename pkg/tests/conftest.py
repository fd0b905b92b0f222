import json
import sys
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from dlgdkit.series import MonthIndex, MonthlySeries, month_range

# so test modules can import the shared oracles as a plain module
sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

FIXTURES = Path(__file__).parent / "fixtures"

START = MonthIndex(2008, 1)


def make_series(values, name="s", start=START, weights=None, is_rate=False, kind=None):
    return MonthlySeries(
        name=name,
        months=month_range(start, len(values)),
        values=values,
        weights=weights,
        is_rate=is_rate,
        kind=kind,
    )


@pytest.fixture
def fixture_dir() -> Path:
    return FIXTURES


@pytest.fixture
def paper_shaped_pair():
    """The 47-month step-shaped pair used across the downturn tests.

    RD: 8 months at 4.2% then 39 at 1.0%; exceedance threshold ~2.76%, so
    exactly the first 8 months form a downturn window.  LGD: downturn
    block with mean 0.26 / std 0.02, low-default block with mean 0.27 /
    std 0.01.
    """
    from dlgdkit.series import AlignedPair

    rd_values = [0.042] * 8 + [0.010] * 39
    lgd_values = (
        [0.29, 0.23, 0.28, 0.24, 0.27, 0.25, 0.26, 0.26]
        + [0.31, 0.23, 0.28, 0.26, 0.28, 0.26, 0.28, 0.26]
        + [0.27] * 31
    )
    rd = make_series(rd_values, name="rd", is_rate=True, kind="rd")
    lgd = make_series(
        lgd_values, name="lgd", weights=[1.0] * 47, is_rate=True, kind="lgd"
    )
    return AlignedPair(rd=rd, lgd=lgd)


class _SgsHandler(BaseHTTPRequestHandler):
    """Serves the next scripted (status, body) entry and records the request."""

    def do_GET(self):
        server = self.server
        server.requests.append(self.path)
        step = min(len(server.requests) - 1, len(server.script) - 1)
        status, body = server.script[step]
        payload = body if isinstance(body, (bytes, str)) else json.dumps(body)
        if isinstance(payload, str):
            payload = payload.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture
def sgs_server():
    """A local stand-in for the SGS service, scripted per test.

    Set ``server.script`` to a list of (status, json-able body) pairs; the
    last entry repeats.  ``server.endpoint`` is the base URL to pass to
    the client, ``server.requests`` the raw request paths seen.
    """
    server = ThreadingHTTPServer(("127.0.0.1", 0), _SgsHandler)
    server.script = [(200, [])]
    server.requests = []
    server.endpoint = f"http://127.0.0.1:{server.server_address[1]}"
    thread = threading.Thread(
        target=server.serve_forever, kwargs={"poll_interval": 0.02}, daemon=True
    )
    thread.start()
    try:
        yield server
    finally:
        server.shutdown()
        thread.join()
        server.server_close()


def sgs_observation(year, month, valor, day=1):
    """One wire-format observation dict."""
    return {"data": f"{day:02d}/{month:02d}/{year:04d}", "valor": str(valor)}


# Populated by the acceptance suite; echoed after the run so the
# per-criterion verdicts survive output capturing.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
