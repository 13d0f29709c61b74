"""Seasonal-trend decomposition and the active-hours filter.

The moving-average convention is pinned against statsmodels'
seasonal_decompose (additive model), which uses the same centered filter;
agreement is required to be bit-exact for both period parities.
"""

import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from statsmodels.tsa.seasonal import seasonal_decompose

from qextremes.decomposition import (
    DEFAULT_DAY_END,
    DEFAULT_DAY_START,
    TimeSeries,
    active_hours_filter,
    decompose,
    residual_series,
)
from qextremes.errors import (
    EmptySeriesError,
    InsufficientDataError,
    ParameterDomainError,
)

START = dt.datetime(2024, 3, 4, 0, 0, 0)


def _series(values, interval=120.0, start=START, label="x"):
    return TimeSeries(start_time=start, interval=interval,
                      values=np.asarray(values, dtype=float), label=label)


# ---------------------------------------------------------------------------
# TimeSeries basics


def test_interval_must_be_positive():
    with pytest.raises(ParameterDomainError):
        _series([1.0, 2.0], interval=0.0)


def test_offsets_default_to_uniform_grid():
    s = _series([1.0, 2.0, 3.0])
    np.testing.assert_array_equal(s.offsets, [0.0, 120.0, 240.0])


def test_with_values_keeps_shape():
    s = _series([1.0, 2.0, 3.0])
    with pytest.raises(ParameterDomainError):
        s.with_values([1.0, 2.0])


def test_time_of_day_wraps_at_midnight():
    s = _series(np.zeros(720), start=dt.datetime(2024, 3, 4, 23, 58))
    tod = s.time_of_day_seconds()
    assert tod[0] == 23 * 3600 + 58 * 60
    assert tod[1] == 0.0
    assert tod[2] == 120.0


# ---------------------------------------------------------------------------
# active-hours filter


def test_default_window_keeps_450_of_720_daily_samples():
    day = _series(np.arange(720.0))  # 24 h of 2-minute samples
    kept = active_hours_filter(day, DEFAULT_DAY_START, DEFAULT_DAY_END)
    assert len(kept) == 450
    assert kept.start_time == START.replace(hour=7)
    # values are untouched, just selected
    np.testing.assert_array_equal(kept.values, np.arange(210.0, 660.0))


def test_whole_day_window_is_identity():
    day = _series(np.arange(720.0))
    kept = active_hours_filter(day, "00:00", "23:59")
    assert len(kept) == 720
    np.testing.assert_array_equal(kept.values, day.values)


def test_window_with_no_samples_is_an_error():
    night = _series(np.zeros(10), start=dt.datetime(2024, 3, 4, 2, 0))
    with pytest.raises(EmptySeriesError):
        active_hours_filter(night, "07:00", "08:00")


def test_inverted_window_is_an_error():
    with pytest.raises(ParameterDomainError):
        active_hours_filter(_series(np.zeros(10)), "09:00", "07:00")


def test_filter_is_idempotent():
    three_days = _series(np.arange(2160.0))
    once = active_hours_filter(three_days)
    twice = active_hours_filter(once)
    assert once.start_time == twice.start_time
    np.testing.assert_array_equal(once.values, twice.values)
    np.testing.assert_array_equal(once.offsets, twice.offsets)


def test_filter_concatenates_days_in_order():
    two_days = _series(np.arange(1440.0))
    kept = active_hours_filter(two_days)
    assert len(kept) == 900
    # day boundary: last sample of day one is 21:58, first of day two 07:00
    assert kept.values[449] == 659.0
    assert kept.values[450] == 930.0


# ---------------------------------------------------------------------------
# decomposition


def test_constant_series_decomposes_trivially():
    result = decompose(_series(np.full(100, 7.5)), 10)
    defined = ~np.isnan(result.trend.values)
    np.testing.assert_allclose(result.trend.values[defined], 7.5, atol=1e-12)
    np.testing.assert_allclose(result.seasonal.values, 0.0, atol=1e-12)
    np.testing.assert_allclose(result.residual.values[defined], 0.0, atol=1e-12)


def test_pure_sinusoid_lands_in_seasonal():
    period = 24
    t = np.arange(8 * period)
    wave = 3.0 * np.sin(2 * np.pi * t / period)
    result = decompose(_series(wave), period)
    defined = ~np.isnan(result.trend.values)
    np.testing.assert_allclose(result.seasonal.values, wave, atol=1e-6)
    np.testing.assert_allclose(result.residual.values[defined], 0.0, atol=1e-6)


def test_matches_statsmodels_even_period():
    rng = np.random.default_rng(5)
    t = np.arange(400)
    x = 0.03 * t + 4.0 * np.sin(2 * np.pi * t / 24) + rng.normal(0, 1, 400)
    mine = decompose(_series(x), 24)
    ref = seasonal_decompose(x, model="additive", period=24)
    np.testing.assert_array_equal(mine.trend.values, np.asarray(ref.trend))
    np.testing.assert_array_equal(mine.seasonal.values, np.asarray(ref.seasonal))
    np.testing.assert_array_equal(mine.residual.values, np.asarray(ref.resid))


def test_matches_statsmodels_odd_period():
    rng = np.random.default_rng(6)
    x = rng.normal(10, 2, 300)
    mine = decompose(_series(x), 25)
    ref = seasonal_decompose(x, model="additive", period=25)
    np.testing.assert_array_equal(mine.trend.values, np.asarray(ref.trend))
    np.testing.assert_array_equal(mine.seasonal.values, np.asarray(ref.seasonal))
    np.testing.assert_array_equal(mine.residual.values, np.asarray(ref.resid))


def test_residual_recovers_injected_noise():
    # The moving average leaks noise variance of order 1/period into the
    # trend and 1/reps into the seasonal profile, so the achievable
    # correlation is about (1 + 1/period + 1/reps)**-0.5; the operational
    # period of 450 with 90 repetitions sits near 0.993.
    period = 450
    n = 90 * period
    rng = np.random.default_rng(11)
    t = np.arange(n)
    square = np.where((t % period) < period // 2, 5.0, -5.0)
    noise = rng.normal(0.0, 2.0, n)
    x = 20.0 + 0.0005 * t + square + noise
    result = decompose(_series(x), period)
    defined = ~np.isnan(result.residual.values)
    got = result.residual.values[defined]
    corr = np.corrcoef(got, noise[defined])[0, 1]
    assert corr > 0.99


def test_reconstruction_identity_and_seasonal_mean():
    rng = np.random.default_rng(3)
    x = rng.normal(50, 5, 260)
    result = decompose(_series(x), 20)
    total = (result.seasonal.values + result.trend.values
             + result.residual.values)
    defined = ~np.isnan(result.trend.values)
    np.testing.assert_allclose(total[defined], x[defined], atol=1e-9, rtol=0)
    for k in range(0, 260 - 20, 20):
        assert abs(np.mean(result.seasonal.values[k:k + 20])) < 1e-9


def test_short_series_and_bad_period_are_errors():
    with pytest.raises(InsufficientDataError):
        decompose(_series(np.zeros(39)), 20)
    with pytest.raises(ParameterDomainError):
        decompose(_series(np.zeros(39)), 1)


def test_decompose_is_deterministic():
    rng = np.random.default_rng(9)
    x = rng.normal(0, 1, 200)
    a = decompose(_series(x), 24)
    b = decompose(_series(x.copy()), 24)
    np.testing.assert_array_equal(a.residual.values, b.residual.values)


# ---------------------------------------------------------------------------
# residual extraction


def test_residual_series_drops_exactly_the_edges():
    n = 200
    x = np.random.default_rng(2).normal(0, 1, n)
    even = residual_series(decompose(_series(x), 24))
    assert len(even) == n - 24          # half-window of 12 on each side
    odd = residual_series(decompose(_series(x), 25))
    assert len(odd) == n - 24           # (25 - 1) / 2 on each side
    assert not np.any(np.isnan(even.values))
    assert not np.any(np.isnan(odd.values))


def test_residual_series_of_constant_is_zero():
    out = residual_series(decompose(_series(np.full(80, 3.0)), 10))
    np.testing.assert_allclose(out.values, 0.0, atol=1e-12)


def test_residual_series_shifts_the_clock():
    x = np.random.default_rng(4).normal(0, 1, 96)
    out = residual_series(decompose(_series(x), 24))
    # 12 samples of 120 s trimmed from the front
    assert out.start_time == START + dt.timedelta(seconds=12 * 120)
    assert out.offsets[0] == 0.0


# ---------------------------------------------------------------------------
# randomized invariants


@settings(max_examples=40, deadline=None)
@given(
    period=st.integers(2, 12),
    reps=st.integers(2, 6),
    extra=st.integers(0, 11),
    seed=st.integers(0, 2**31 - 1),
)
def test_decomposition_invariants(period, reps, extra, seed):
    n = period * reps + extra
    x = np.random.default_rng(seed).normal(0, 1, n)
    result = decompose(_series(x), period)
    defined = ~np.isnan(result.trend.values)
    # edge loss is period for even, period - 1 for odd periods
    lost = period if period % 2 == 0 else period - 1
    assert int(np.sum(~defined)) == min(lost, n)
    total = (result.seasonal.values + result.trend.values
             + result.residual.values)[defined]
    np.testing.assert_allclose(total, x[defined], atol=1e-9, rtol=0)
    assert abs(float(np.mean(result.seasonal.values[:period]))) < 1e-9
