"""Per-block extreme extraction: discard rule, duality, composition."""

import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qextremes.block_maxima import extract_block_maxima, extract_block_minima
from qextremes.decomposition import TimeSeries
from qextremes.errors import InsufficientDataError, ParameterDomainError
from qextremes.fitting import FittedDistribution, fit_mle


def test_block_maxima_of_small_example():
    out = extract_block_maxima([1, 3, 2, 5, 4, 6], 3)
    np.testing.assert_array_equal(out.maxima, [3.0, 6.0])
    assert out.block_size == 3


def test_block_minima_of_small_example():
    out = extract_block_minima([1, 3, 2, 5, 4, 6], 3)
    np.testing.assert_array_equal(out.maxima, [1.0, 4.0])


def test_block_size_one_is_identity():
    values = [4.0, 1.0, 7.0, 2.0]
    np.testing.assert_array_equal(extract_block_maxima(values, 1).maxima, values)


def test_trailing_partial_block_is_discarded():
    out = extract_block_maxima(np.arange(10.0), 4)
    np.testing.assert_array_equal(out.maxima, [3.0, 7.0])


def test_constant_series_gives_constant_minima():
    out = extract_block_minima(np.full(9, 2.5), 3)
    np.testing.assert_array_equal(out.maxima, [2.5, 2.5, 2.5])


def test_minima_are_negated_maxima_of_negated_input():
    rng = np.random.default_rng(8)
    x = rng.normal(0, 1, 53)
    np.testing.assert_array_equal(
        extract_block_minima(x, 5).maxima,
        -extract_block_maxima(-x, 5).maxima)


def test_time_series_input_keeps_the_label():
    series = TimeSeries(dt.datetime(2024, 1, 1), 120.0,
                        np.arange(8.0), label="elm_st")
    out = extract_block_maxima(series, 2)
    assert out.source_label == "elm_st"
    np.testing.assert_array_equal(out.maxima, [1.0, 3.0, 5.0, 7.0])


def test_invalid_block_sizes_raise():
    with pytest.raises(ParameterDomainError):
        extract_block_maxima([1.0, 2.0], 0)
    with pytest.raises(InsufficientDataError):
        extract_block_maxima([1.0, 2.0], 3)


def test_bounded_support_maxima_fit_negative_shape():
    # Maxima of a bounded distribution sit in the Weibull domain of
    # attraction, so the fitted GEV shape must come out negative.
    rng = np.random.default_rng(17)
    maxima = extract_block_maxima(rng.uniform(0, 1, 10_000), 100)
    fit = fit_mle(maxima.maxima, "genextreme")
    assert isinstance(fit, FittedDistribution)
    assert fit.params[2] < 0


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(1, 120),
    a=st.integers(1, 6),
    b=st.integers(1, 6),
    seed=st.integers(0, 2**31 - 1),
)
def test_block_composition_and_domination(n, a, b, seed):
    x = np.random.default_rng(seed).normal(0, 1, n)
    if n < a * b:
        return
    coarse = extract_block_maxima(x, a * b).maxima
    two_step = extract_block_maxima(extract_block_maxima(x, a).maxima, b).maxima
    np.testing.assert_array_equal(coarse, two_step)
    assert len(coarse) == n // (a * b)
    # every block maximum dominates its block and its block minimum
    fine = extract_block_maxima(x, a)
    mins = extract_block_minima(x, a)
    blocks = x[: (n // a) * a].reshape(-1, a)
    assert np.all(fine.maxima[:, None] >= blocks)
    assert np.all(fine.maxima >= mins.maxima)
