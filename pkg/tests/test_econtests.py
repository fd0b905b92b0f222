import math

import numpy as np
import pytest

from conftest import make_series
from dlgdkit.dist import DeterministicTerms, df_critical
from dlgdkit.econtests import (
    CausalityVerdict,
    GrangerCell,
    UnitRootVerdict,
    adf_test,
    fit_var,
    granger_grid,
    granger_test,
)
from dlgdkit.errors import (
    DomainError,
    InsufficientData,
    NonStationaryInput,
    RankDeficient,
    UnsupportedLevel,
)
from dlgdkit.series import align


def _white_noise(n, seed, scale=1.0, loc=0.0):
    rng = np.random.default_rng(seed)
    return loc + scale * rng.standard_normal(n)


def _random_walk(n, seed, scale=1.0):
    return np.cumsum(_white_noise(n, seed, scale))


def _pair(cause_vals, effect_vals, cause_role="rd"):
    """Aligned pair with the cause playing the given role."""
    if cause_role == "rd":
        rd, lgd = cause_vals, effect_vals
    else:
        rd, lgd = effect_vals, cause_vals
    return align(
        make_series(list(rd), name="rd-series", kind="rd"),
        make_series(list(lgd), name="lgd-series", kind="lgd"),
    )


def _planted_lag_pair(n, lag, beta, seed, cause_role="rd"):
    """Stationary cause driving the effect at exactly one lag."""
    rng = np.random.default_rng(seed)
    cause = rng.standard_normal(n)
    noise = rng.standard_normal(n)
    effect = np.empty(n)
    for t in range(n):
        effect[t] = 0.3 * (effect[t - 1] if t > 0 else 0.0) + noise[t]
        if t >= lag:
            effect[t] += beta * cause[t - lag]
    return _pair(cause, effect, cause_role)


class TestAdf:
    def test_white_noise_is_stationary(self):
        series = make_series(list(_white_noise(200, 7)))
        result = adf_test(series)
        assert result.verdict is UnitRootVerdict.STATIONARY
        assert result.statistic < result.critical_values[5]

    def test_random_walk_has_unit_root(self):
        series = make_series(list(_random_walk(200, 7)))
        result = adf_test(series)
        assert result.verdict is UnitRootVerdict.HAS_UNIT_ROOT

    def test_differenced_random_walk_is_stationary(self):
        walk = _random_walk(201, 11)
        series = make_series(list(np.diff(walk)))
        assert adf_test(series).verdict is UnitRootVerdict.STATIONARY

    def test_verdict_matches_tabulated_threshold(self):
        series = make_series(list(_white_noise(150, 3)))
        result = adf_test(series, alpha=0.05)
        critical = df_critical(DeterministicTerms.CONSTANT, result.nobs, 5)
        assert result.critical_values[5] == critical
        assert (result.statistic < critical) == (
            result.verdict is UnitRootVerdict.STATIONARY
        )

    def test_shift_invariance_constant_model(self):
        # adding a constant must not move the statistic when the
        # regression already carries an intercept
        values = _white_noise(120, 19)
        a = adf_test(make_series(list(values)))
        b = adf_test(make_series(list(values + 50.0)))
        assert a.statistic == pytest.approx(b.statistic, rel=1e-9)
        assert a.lags_used == b.lags_used

    def test_constant_series_is_rank_deficient(self):
        series = make_series([0.25] * 60)
        with pytest.raises(RankDeficient):
            adf_test(series)

    def test_short_series_rejected(self):
        series = make_series(list(_white_noise(15, 2)))
        with pytest.raises(InsufficientData):
            adf_test(series, max_lags=10)

    def test_short_series_ok_with_smaller_budget(self):
        series = make_series(list(_white_noise(15, 2)))
        result = adf_test(series, max_lags=2)
        assert 0 <= result.lags_used <= 2

    def test_negative_max_lags(self):
        with pytest.raises(DomainError):
            adf_test(make_series(list(_white_noise(60, 1))), max_lags=-1)

    def test_bad_alpha(self):
        with pytest.raises(UnsupportedLevel):
            adf_test(make_series(list(_white_noise(60, 1))), alpha=0.2)

    def test_lag_selection_stays_in_grid(self):
        for seed in range(5):
            series = make_series(list(_white_noise(80, seed)))
            result = adf_test(series, max_lags=6)
            assert 0 <= result.lags_used <= 6
            # reported sample is the refit sample, not the search sample
            assert result.nobs == 80 - 1 - result.lags_used

    def test_ar_series_picks_nonzero_lag(self):
        # an AR(2) difference process gives the lag search something to find
        rng = np.random.default_rng(23)
        n = 400
        y = np.zeros(n)
        for t in range(2, n):
            y[t] = 0.5 * y[t - 1] + 0.3 * y[t - 2] + rng.standard_normal()
        result = adf_test(make_series(list(y)), max_lags=6)
        assert result.lags_used >= 1


class TestFitVar:
    def test_recovers_planted_coefficients(self):
        rng = np.random.default_rng(31)
        n = 600
        rd = np.zeros(n)
        lgd = np.zeros(n)
        for t in range(1, n):
            rd[t] = 0.5 * rd[t - 1] + 0.1 * rng.standard_normal()
            lgd[t] = 0.3 * lgd[t - 1] + 0.4 * rd[t - 1] + 0.1 * rng.standard_normal()
        pair = _pair(rd, lgd, cause_role="rd")
        model = fit_var(pair, order=1)
        assert model.order == 1
        assert model.t_eff == n - 1
        assert model.rd_equation.coefficient("rd[-1]") == pytest.approx(0.5, abs=0.08)
        assert model.lgd_equation.coefficient("rd[-1]") == pytest.approx(0.4, abs=0.08)
        assert model.lgd_equation.coefficient("lgd[-1]") == pytest.approx(0.3, abs=0.08)

    def test_shared_design_labels(self):
        pair = _pair(_white_noise(60, 1), _white_noise(60, 2))
        model = fit_var(pair, order=2)
        assert model.rd_equation.col_labels == (
            "const",
            "rd[-1]",
            "rd[-2]",
            "lgd[-1]",
            "lgd[-2]",
        )
        assert model.lgd_equation.col_labels == model.rd_equation.col_labels

    def test_order_zero_rejected(self):
        pair = _pair(_white_noise(60, 1), _white_noise(60, 2))
        with pytest.raises(DomainError):
            fit_var(pair, order=0)

    def test_too_short_for_order(self):
        pair = _pair(_white_noise(14, 1), _white_noise(14, 2))
        with pytest.raises(InsufficientData):
            fit_var(pair, order=2)
        # 2p + 11 = 15 is the cliff edge
        pair = _pair(_white_noise(15, 1), _white_noise(15, 2))
        fit_var(pair, order=2)


class TestGrangerTest:
    def test_planted_causality_detected(self):
        pair = _planted_lag_pair(300, lag=2, beta=0.9, seed=5)
        result = granger_test(pair, cause="rd", lag=2)
        assert result.verdict is CausalityVerdict.CAUSES
        assert result.p_value < 0.05
        assert result.cause == "rd-series"
        assert result.effect == "lgd-series"
        assert result.d1 == 2
        assert result.d2 == (300 - 2) - 5
        assert result.rss_unrestricted <= result.rss_restricted

    def test_independent_series_not_detected(self):
        pair = _pair(_white_noise(400, 41), _white_noise(400, 42))
        result = granger_test(pair, cause="rd", lag=3)
        assert result.p_value > 0.05
        assert result.verdict is CausalityVerdict.DOES_NOT_CAUSE

    def test_direction_by_series_name(self):
        pair = _planted_lag_pair(200, lag=1, beta=0.8, seed=9)
        by_role = granger_test(pair, cause="rd", lag=1)
        by_name = granger_test(pair, cause="rd-series", lag=1)
        assert by_role.f_statistic == by_name.f_statistic

    def test_reverse_direction_is_weaker(self):
        pair = _planted_lag_pair(400, lag=1, beta=1.2, seed=13)
        forward = granger_test(pair, cause="rd", lag=1)
        reverse = granger_test(pair, cause="lgd", lag=1)
        assert forward.f_statistic > reverse.f_statistic
        assert reverse.cause == "lgd-series"
        assert reverse.effect == "rd-series"

    def test_unknown_direction(self):
        pair = _pair(_white_noise(60, 1), _white_noise(60, 2))
        with pytest.raises(DomainError):
            granger_test(pair, cause="gdp", lag=1)

    def test_gate_rejects_random_walk(self):
        pair = _pair(_random_walk(200, 3), _white_noise(200, 4))
        with pytest.raises(NonStationaryInput):
            granger_test(pair, cause="rd", lag=1)

    def test_gate_waived_by_role(self):
        pair = _pair(_random_walk(200, 3), _white_noise(200, 4))
        result = granger_test(pair, cause="rd", lag=1, assume_stationary=("rd",))
        assert result.lag == 1

    def test_gate_waived_by_both(self):
        pair = _pair(_random_walk(200, 3), _random_walk(200, 4))
        result = granger_test(pair, cause="rd", lag=1, assume_stationary=("both",))
        assert result.lag == 1

    def test_gate_waiver_must_name_series(self):
        pair = _pair(_white_noise(60, 1), _white_noise(60, 2))
        with pytest.raises(DomainError):
            granger_test(pair, cause="rd", lag=1, assume_stationary=("gdp",))

    def test_f_statistic_from_rss_decomposition(self):
        pair = _planted_lag_pair(150, lag=1, beta=0.6, seed=17)
        r = granger_test(pair, cause="rd", lag=1)
        expect = ((r.rss_restricted - r.rss_unrestricted) / r.d1) / (
            r.rss_unrestricted / r.d2
        )
        assert r.f_statistic == pytest.approx(expect, rel=1e-12)


class TestGrangerGrid:
    def test_shape_and_order(self):
        pair = _planted_lag_pair(200, lag=2, beta=0.8, seed=21)
        cells = granger_grid(pair, max_lag=4)
        assert len(cells) == 8
        assert [c.lag for c in cells] == [1, 2, 3, 4, 1, 2, 3, 4]
        # rd->lgd block first
        assert all(c.cause == "rd-series" for c in cells[:4])
        assert all(c.cause == "lgd-series" for c in cells[4:])
        assert all(isinstance(c, GrangerCell) for c in cells)

    def test_grid_agrees_with_single_tests(self):
        pair = _planted_lag_pair(200, lag=2, beta=0.8, seed=21)
        cells = granger_grid(pair, max_lag=3)
        for cell in cells:
            assert cell.computed
            single = granger_test(
                pair, cause=cell.cause, lag=cell.lag
            )
            assert cell.result.f_statistic == single.f_statistic
            assert cell.result.p_value == single.p_value

    def test_planted_lag_found_at_its_order(self):
        pair = _planted_lag_pair(300, lag=3, beta=1.0, seed=29)
        cells = granger_grid(pair, max_lag=5)
        forward = {c.lag: c for c in cells if c.cause == "rd-series"}
        assert forward[3].result.verdict is CausalityVerdict.CAUSES
        # at shorter lags the causal channel is invisible to the test
        assert forward[1].result.f_statistic < forward[3].result.f_statistic

    def test_nonstationary_cells_are_skipped_not_raised(self):
        pair = _pair(_random_walk(200, 3), _white_noise(200, 4))
        cells = granger_grid(pair, max_lag=2)
        assert len(cells) == 4
        assert all(not c.computed for c in cells)
        assert all("unit root" in c.skip_reason for c in cells)

    def test_waiver_unblocks_grid(self):
        pair = _pair(_random_walk(200, 3), _white_noise(200, 4))
        cells = granger_grid(pair, max_lag=2, assume_stationary=("both",))
        assert all(c.computed for c in cells)

    def test_large_lags_skip_with_size_reason(self):
        pair = _pair(_white_noise(20, 1), _white_noise(20, 2))
        cells = granger_grid(pair, max_lag=8, assume_stationary=("both",))
        small = [c for c in cells if c.lag <= 4]
        large = [c for c in cells if c.lag > 4]
        assert all(c.computed for c in small)
        assert all(not c.computed for c in large)
        assert all("observations" in c.skip_reason for c in large)

    def test_bad_max_lag(self):
        pair = _pair(_white_noise(60, 1), _white_noise(60, 2))
        with pytest.raises(DomainError):
            granger_grid(pair, max_lag=0)
