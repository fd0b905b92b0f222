"""Acceptance gate: one test per shipping criterion.

Each test wraps its body in ``criterion(...)``, which emits a
'[ACCEPTANCE] criterion N (...): PASS|FAIL' line into the terminal
summary, so a full run ends with one verdict line per criterion.
"""

import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

import _oracles
import conftest
from conftest import make_series, sgs_observation
from dlgdkit.cli import main
from dlgdkit.downturn import (
    PeriodTag,
    Variant,
    assess,
    detect_downturns,
    downturn_lgd,
    exceedance_threshold,
    union_months,
)
from dlgdkit.dist import f_cdf, t_cdf
from dlgdkit.econtests import CausalityVerdict, UnitRootVerdict, adf_test, granger_test
from dlgdkit.errors import (
    DegenerateSeries,
    FrequencyMismatch,
    GapInSeries,
    HttpError,
    InsufficientData,
    NonPositiveDenominator,
    WireFormatError,
)
from dlgdkit.ingest import fetch_bcb_series, read_series_csv, render_series_csv
from dlgdkit.regression import DesignMatrix, ols_fit
from dlgdkit.series import AlignedPair, MonthIndex, pearson, summary
from dlgdkit.synth import SynthKind, SynthSpec, generate


@contextmanager
def criterion(num, desc):
    try:
        yield
    except BaseException:
        conftest.ACCEPTANCE_LINES.append(f"[ACCEPTANCE] criterion {num} ({desc}): FAIL")
        raise
    conftest.ACCEPTANCE_LINES.append(f"[ACCEPTANCE] criterion {num} ({desc}): PASS")


def _rate_pair(rd_values, lgd_values, lgd_weights=None):
    rd = make_series(list(rd_values), name="rd", is_rate=True, kind="rd")
    lgd = make_series(
        list(lgd_values), name="lgd", weights=lgd_weights, is_rate=True, kind="lgd"
    )
    return AlignedPair(rd=rd, lgd=lgd)


def test_criterion_1_foundations_match_exact_arithmetic():
    with criterion(1, "moment/correlation/OLS kernels vs exact-arithmetic oracles"):
        started = time.monotonic()
        rng = np.random.default_rng(20260825)
        instances = 0

        for _ in range(400):  # pearson + summary on one draw each
            n = int(rng.integers(3, 25))
            xs = rng.uniform(-10.0, 10.0, n)
            ys = rng.uniform(-10.0, 10.0, n)
            pair = _pearson_pair(xs, ys)
            got = pearson(pair)
            expect = _oracles.exact_pearson(xs.tolist(), ys.tolist())
            assert abs(got - expect) < 1e-8
            stats = summary(pair.lgd)
            assert abs(stats.mean - float(_oracles.exact_mean(ys))) < 1e-8
            assert abs(stats.std - _oracles.exact_std(ys)) < 1e-8
            instances += 1

        for _ in range(300):  # weighted means
            n = int(rng.integers(2, 30))
            values = rng.uniform(0.0, 1.0, n)
            weights = rng.uniform(0.1, 5.0, n)
            series = make_series(
                list(values), weights=list(weights), is_rate=True, kind="lgd"
            )
            got = summary(series).weighted_mean
            expect = float(_oracles.exact_weighted_mean(values.tolist(), weights.tolist()))
            assert abs(got - expect) < 1e-8
            instances += 1

        for _ in range(300):  # OLS vs rational normal equations
            t = int(rng.integers(8, 40))
            k = int(rng.integers(1, 5))
            X = rng.normal(size=(t, k))
            y = rng.normal(size=t)
            fit = ols_fit(
                DesignMatrix(X, tuple(f"c{i}" for i in range(k))), y
            )
            expect = _oracles.normal_equations_ols(X.tolist(), y.tolist())
            assert np.max(np.abs(fit.coefficients - np.asarray(expect))) < 1e-8
            instances += 1

        elapsed = time.monotonic() - started
        assert instances == 1000
        assert elapsed < 10.0, f"oracle comparison took {elapsed:.1f}s"


def _pearson_pair(xs, ys):
    rd = make_series(list(xs), name="x", kind="rd")
    lgd = make_series(list(ys), name="y", kind="lgd")
    return AlignedPair(rd=rd, lgd=lgd)


def test_criterion_2_distribution_functions_match_quadrature():
    from scipy import integrate

    with criterion(2, "t/F CDFs vs numerical quadrature and closed identities"):
        checked = 0
        for dof in (1, 3, 8, 25, 120):
            for x in (-4.0, -1.5, -0.4, 0.9, 3.2):
                got = t_cdf(x, dof)
                expect, err = integrate.quad(
                    lambda u: _oracles.student_t_pdf(u, dof), -math.inf, x
                )
                assert abs(got - expect) < 1e-8 + 10.0 * err
                checked += 1
        for d1, d2 in ((1, 6), (3, 12), (5, 5), (9, 40), (20, 20)):
            for x in (0.15, 0.6, 1.0, 2.4, 6.0):
                got = f_cdf(x, d1, d2)
                expect, err = integrate.quad(
                    lambda u: _oracles.f_pdf(u, d1, d2), 0.0, x
                )
                assert abs(got - expect) < 1e-8 + 10.0 * err
                checked += 1
        assert checked == 50

        for d in (2, 7, 33, 200):
            for x in (0.3, 1.4, 2.9):
                assert abs(t_cdf(x, d) + t_cdf(-x, d) - 1.0) < 1e-10
                assert abs(f_cdf(x * x, 1, d) - (2.0 * t_cdf(x, d) - 1.0)) < 1e-10
                assert abs(f_cdf(x, d, 7) - (1.0 - f_cdf(1.0 / x, 7, d))) < 1e-10


def test_criterion_3_unit_root_test_has_power_and_level():
    with criterion(3, "ADF separates random walks from white noise"):
        started = time.monotonic()
        seeds = 500
        t_len = 200
        walk_unit_root = 0
        noise_stationary = 0
        for seed in range(seeds):
            rng = np.random.default_rng(seed)
            shocks = rng.standard_normal(t_len)
            walk = make_series(list(np.cumsum(shocks)))
            noise = make_series(list(rng.standard_normal(t_len)))
            if adf_test(walk).verdict is UnitRootVerdict.HAS_UNIT_ROOT:
                walk_unit_root += 1
            if adf_test(noise).verdict is UnitRootVerdict.STATIONARY:
                noise_stationary += 1
        elapsed = time.monotonic() - started
        assert walk_unit_root >= 0.90 * seeds, (
            f"only {walk_unit_root}/{seeds} walks kept their unit root"
        )
        assert noise_stationary >= 0.95 * seeds, (
            f"only {noise_stationary}/{seeds} noise draws called stationary"
        )
        assert elapsed < 60.0, f"ADF study took {elapsed:.1f}s"


def test_criterion_4_causality_test_has_power_and_size():
    with criterion(4, "Granger F test detects planted lag, holds its size"):
        started = time.monotonic()

        detected = 0
        power_seeds = 500
        for seed in range(power_seeds):
            spec = SynthSpec(
                kind=SynthKind.VAR_CAUSALITY,
                length=400,
                seed=seed,
                noise_std=1.0,
                own_coefficient=0.3,
                cross_coefficient=0.8,
                cross_lag=5,
            )
            pair = generate(spec)
            result = granger_test(
                pair, cause="lgd", lag=5, assume_stationary=("both",)
            )
            if result.verdict is CausalityVerdict.CAUSES:
                detected += 1
        assert detected >= 0.90 * power_seeds, (
            f"planted causality found in only {detected}/{power_seeds} draws"
        )

        alpha = 0.05
        size_seeds = 1000
        false_hits = 0
        for seed in range(size_seeds):
            rng = np.random.default_rng(10_000 + seed)
            pair = _pearson_pair(
                rng.standard_normal(200), rng.standard_normal(200)
            )
            result = granger_test(
                pair, cause="x", lag=3, alpha=alpha, assume_stationary=("both",)
            )
            if result.p_value < alpha:
                false_hits += 1
        rate = false_hits / size_seeds
        assert abs(rate - alpha) < 0.03, (
            f"false-rejection rate {rate:.3f} strays from alpha {alpha}"
        )
        elapsed = time.monotonic() - started
        assert elapsed < 120.0, f"causality study took {elapsed:.1f}s"


def test_criterion_5_window_detection_matches_brute_force(paper_shaped_pair):
    with criterion(5, "downturn windows equal quadratic brute-force enumeration"):
        # the canonical shape first
        windows = detect_downturns(paper_shaped_pair.rd)
        assert [(str(w.start), str(w.end)) for w in windows] == [
            ("2008-01", "2008-08")
        ]

        rng = np.random.default_rng(55)
        compared = 0
        while compared < 1000:
            n = int(rng.integers(2, 37))
            base = rng.uniform(0.005, 0.02)
            values = rng.uniform(0.0, 2.0 * base, n)
            spikes = rng.random(n) < 0.25
            values = np.where(spikes, values + rng.uniform(0.01, 0.05), values)
            values = np.clip(values, 0.0, 1.0)
            min_window = int(rng.integers(1, 9))
            rd = make_series(list(values), is_rate=True, kind="rd")
            try:
                windows = detect_downturns(rd, min_window=min_window)
            except (DegenerateSeries, InsufficientData):
                continue
            threshold = exceedance_threshold(rd)
            expect = _oracles.brute_force_windows(
                values.tolist(), threshold, min_window
            )
            got = [(rd.index_of(w.start), rd.index_of(w.end)) for w in windows]
            assert got == expect
            compared += 1


def test_criterion_6_addon_identity_and_documented_uplifts():
    with criterion(6, "add-on identity holds; documented uplift pairs are coherent"):
        # the two documented (absolute add-on, relative uplift) pairs imply
        # the same reference LGD level through addon = uplift * base
        strict_base = 0.02 / 0.0773
        lenient_base = 0.0183 / 0.07
        assert strict_base == pytest.approx(0.2587, abs=5e-4)
        assert lenient_base == pytest.approx(0.2614, abs=5e-4)
        assert abs(strict_base - lenient_base) < 0.01

        rng = np.random.default_rng(66)
        checked = 0
        while checked < 200:
            n = int(rng.integers(14, 40))
            rd_values = [0.05] * 6 + list(rng.uniform(0.005, 0.02, n - 6))
            lgd_values = list(rng.uniform(0.05, 0.95, n))
            pair = _rate_pair(rd_values, lgd_values)
            months = union_months(detect_downturns(pair.rd))
            if not months:
                continue
            variant = Variant.STRICT if checked % 2 else Variant.LENIENT
            try:
                a = assess(pair, months, variant)
            except (NonPositiveDenominator, DegenerateSeries):
                continue
            assert math.isclose(
                a.ratio, a.numerator / a.denominator, rel_tol=1e-12, abs_tol=1e-12
            )
            assert math.isclose(
                a.relative_uplift, a.ratio - 1.0, rel_tol=1e-12, abs_tol=1e-12
            )
            assert math.isclose(
                a.addon_absolute,
                a.relative_uplift * a.base_elgd,
                rel_tol=1e-12,
                abs_tol=1e-12,
            )
            checked += 1


def test_criterion_7_formula_rendering_and_cap():
    with criterion(7, "add-on formula renders at 4 decimals; final LGD caps at 1"):
        # constant LGD blocks make the add-on land exactly on 0.02:
        # downturn block 0.28, low-default reference 0.26
        pair = _rate_pair(
            [0.05] * 6 + [0.01] * 10,
            [0.28] * 6 + [0.26] * 10,
        )
        months = union_months(detect_downturns(pair.rd))
        assert len(months) == 6
        a = assess(pair, months, Variant.STRICT)
        assert a.downturn_stats.weighted_mean == 0.28
        assert a.downturn_stats.std == 0.0
        assert a.reference_stats.weighted_mean == 0.26
        assert a.addon_absolute == pytest.approx(0.02, abs=1e-15)
        assert a.formula == "dLGD = 0.0200 + ELGD"

        final = downturn_lgd(a, 0.5)
        assert not final.capped
        assert final.value == pytest.approx(0.52, abs=1e-15)
        assert final.value == min(final.elgd + final.addon, 1.0)

        capped = downturn_lgd(a, 0.99)
        assert capped.capped
        assert capped.value == 1.0
        assert capped.elgd + capped.addon > 1.0


def test_criterion_8_reports_are_byte_deterministic(fixture_dir, tmp_path):
    with criterion(8, "analysis reports and plot files are byte-identical across runs"):
        artifacts = []
        for run in ("one", "two"):
            out = tmp_path / run
            out.mkdir()
            code = main(
                [
                    "analyze",
                    "--lgd",
                    str(fixture_dir / "lgd.csv"),
                    "--rd",
                    str(fixture_dir / "rd.csv"),
                    "--assume-stationary",
                    "both",
                    "--out",
                    str(out / "report.json"),
                    "--plot-data",
                    str(out / "plots"),
                ]
            )
            assert code == 0
            artifacts.append(
                {
                    "report": (out / "report.json").read_bytes(),
                    "series": (out / "plots" / "series.tsv").read_bytes(),
                    "downturn": (out / "plots" / "downturn.tsv").read_bytes(),
                    "dlgd": (out / "plots" / "dlgd.tsv").read_bytes(),
                }
            )
        assert artifacts[0] == artifacts[1]
        report = json.loads(artifacts[0]["report"])
        assert report["schema_version"] == 1
        assert report["downturn_lgd"]["strict"]["value"] == pytest.approx(
            0.2890671031096563, rel=1e-15
        )


def test_criterion_9_exchange_format_round_trips_and_wire_client(
    tmp_path, sgs_server
):
    with criterion(9, "CSV write/read is the identity; wire client validates the feed"):
        rng = np.random.default_rng(99)
        for i in range(200):
            n = int(rng.integers(2, 60))
            values = rng.uniform(0.0, 1.0, n)
            weights = (
                list(rng.uniform(0.0, 10.0, n)) if rng.random() < 0.5 else None
            )
            series = make_series(
                list(values),
                name=f"series-{i}",
                weights=weights,
                is_rate=True,
                kind="rd" if i % 2 else "lgd",
            )
            text = render_series_csv(series)
            path = tmp_path / "roundtrip.csv"
            path.write_text(text, encoding="utf-8")
            back = read_series_csv(path)
            assert back == series
            assert np.array_equal(back.values, series.values)
            if weights is None:
                assert back.weights is None
            else:
                assert np.array_equal(back.weights, series.weights)
            assert render_series_csv(back) == text

        start, end = MonthIndex(2011, 1), MonthIndex(2011, 3)

        def fetch():
            return fetch_bcb_series(21082, start, end, sgs_server.endpoint)

        sgs_server.script = [
            (
                200,
                [
                    sgs_observation(2011, 1, "3.5"),
                    sgs_observation(2011, 2, "3.6"),
                    sgs_observation(2011, 3, "3.4"),
                ],
            )
        ]
        series = fetch()
        assert list(series.values) == [3.5 / 100.0, 3.6 / 100.0, 3.4 / 100.0]
        assert series.start == start and series.end == end

        sgs_server.requests.clear()
        sgs_server.script = [(500, "")]
        with pytest.raises(HttpError) as exc:
            fetch()
        assert exc.value.status == 500
        assert len(sgs_server.requests) == 1  # server errors are not retried

        sgs_server.script = [(200, "{broken")]
        with pytest.raises(WireFormatError):
            fetch()

        sgs_server.script = [
            (200, [sgs_observation(2011, 2, "1"), sgs_observation(2011, 1, "1")])
        ]
        with pytest.raises(WireFormatError, match="out of order"):
            fetch()

        sgs_server.script = [
            (
                200,
                [
                    sgs_observation(2011, 1, "1"),
                    sgs_observation(2011, 2, "1"),
                    # March is missing; the spacing is irregular, not a
                    # lower-frequency series
                    sgs_observation(2011, 4, "1"),
                ],
            )
        ]
        with pytest.raises(GapInSeries):
            fetch_bcb_series(21082, start, MonthIndex(2011, 4), sgs_server.endpoint)

        sgs_server.script = [
            (200, [sgs_observation(2011, 1, "1"), sgs_observation(2011, 3, "1")])
        ]
        with pytest.raises(FrequencyMismatch, match="every 2 months"):
            fetch()

        sgs_server.script = [
            (200, [sgs_observation(2011, 1, "1"), sgs_observation(2011, 2, "1", day=15)])
        ]
        with pytest.raises(FrequencyMismatch):
            fetch()

        sgs_server.script = [(200, [])]
        with pytest.raises(WireFormatError, match="no observations"):
            fetch()
