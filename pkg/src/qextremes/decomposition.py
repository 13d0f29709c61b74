"""Additive seasonal-trend decomposition of queue-length series.

The decomposition is the classical centered-moving-average kind: trend from a
window of one season (with the half-weighted-endpoint convention for even
periods), seasonal as the zero-centered mean profile of the detrended series,
residual as what is left.  Trend and residual are undefined (NaN) in the
half-window edges; ``residual_series`` drops those samples before fitting.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

from .errors import EmptySeriesError, InsufficientDataError, ParameterDomainError

__all__ = [
    "SECONDS_PER_DAY",
    "DEFAULT_DAY_START",
    "DEFAULT_DAY_END",
    "TimeSeries",
    "DecompositionResult",
    "active_hours_filter",
    "decompose",
    "residual_series",
]

SECONDS_PER_DAY = 86400.0

# Queue lengths outside 07:00-22:00 are essentially always zero, so the
# working day is 15 hours: 450 two-minute samples.
DEFAULT_DAY_START = "07:00"
DEFAULT_DAY_END = "22:00"

TimeOfDay = Union[str, dt.time]


def _time_of_day_seconds(value: TimeOfDay) -> float:
    if isinstance(value, dt.time):
        t = value
    else:
        try:
            parts = [int(p) for p in str(value).split(":")]
            t = dt.time(*parts)
        except (TypeError, ValueError) as exc:
            raise ParameterDomainError(
                f"cannot parse time of day {value!r}; expected HH:MM[:SS]"
            ) from exc
    return t.hour * 3600.0 + t.minute * 60.0 + t.second + t.microsecond * 1e-6


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled observations with a start time and sample interval.

    ``offsets`` holds each sample's time in seconds since ``start_time``.
    For freshly ingested data it is the uniform grid ``i * interval``; the
    active-hours filter produces offsets with overnight gaps while keeping
    ``interval`` as the nominal sampling spacing.  Downstream positional
    operations (decomposition, block extraction) treat samples as contiguous.
    """

    start_time: dt.datetime
    interval: float
    values: np.ndarray
    label: str = ""
    offsets: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self):
        if self.interval <= 0:
            raise ParameterDomainError(f"interval must be > 0, got {self.interval!r}")
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if self.offsets is None:
            offsets = np.arange(len(values), dtype=float) * self.interval
        else:
            offsets = np.asarray(self.offsets, dtype=float)
            if offsets.shape != values.shape:
                raise ParameterDomainError("offsets and values must align")
        object.__setattr__(self, "offsets", offsets)

    def __len__(self) -> int:
        return len(self.values)

    def time_of_day_seconds(self) -> np.ndarray:
        """Seconds past midnight for every sample."""
        base = (
            self.start_time.hour * 3600.0
            + self.start_time.minute * 60.0
            + self.start_time.second
            + self.start_time.microsecond * 1e-6
        )
        return (base + self.offsets) % SECONDS_PER_DAY

    def sample_times(self) -> list[dt.datetime]:
        return [self.start_time + dt.timedelta(seconds=float(o)) for o in self.offsets]

    def with_values(self, values, label: str | None = None) -> "TimeSeries":
        values = np.asarray(values, dtype=float)
        if values.shape != self.values.shape:
            raise ParameterDomainError("replacement values must keep the length")
        return replace(self, values=values,
                       label=self.label if label is None else label)


@dataclass(frozen=True)
class DecompositionResult:
    """Seasonal, trend and residual components aligned to the source series.

    ``trend`` and ``residual`` are NaN in the first and last half-window
    positions where the centered moving average is undefined.
    """

    seasonal: TimeSeries
    trend: TimeSeries
    residual: TimeSeries
    period: int

    @property
    def edge_loss(self) -> int:
        """Samples lost to the moving-average window (total over both ends)."""
        return self.period if self.period % 2 == 0 else self.period - 1


def active_hours_filter(
    series: TimeSeries,
    day_start: TimeOfDay = DEFAULT_DAY_START,
    day_end: TimeOfDay = DEFAULT_DAY_END,
) -> TimeSeries:
    """Keep only samples whose time of day falls in [day_start, day_end).

    Per-day windows are concatenated in order; the result keeps the input's
    nominal ``interval`` and the true per-sample offsets, which makes the
    filter idempotent for a fixed window.
    """
    lo = _time_of_day_seconds(day_start)
    hi = _time_of_day_seconds(day_end)
    if not lo < hi:
        raise ParameterDomainError(
            "day_start must precede day_end within one calendar day"
        )
    tod = series.time_of_day_seconds()
    keep = (tod >= lo) & (tod < hi)
    if not np.any(keep):
        raise EmptySeriesError(
            f"no samples of {series.label or 'series'} fall inside "
            f"[{day_start}, {day_end})"
        )
    offsets = series.offsets[keep]
    shift = float(offsets[0])
    return TimeSeries(
        start_time=series.start_time + dt.timedelta(seconds=shift),
        interval=series.interval,
        values=series.values[keep],
        label=series.label,
        offsets=offsets - shift,
    )


def _centered_trend(values: np.ndarray, period: int) -> np.ndarray:
    n = len(values)
    if period % 2 == 0:
        # 2 x period convention: period + 1 taps with half-weight endpoints.
        weights = np.full(period + 1, 1.0 / period)
        weights[0] = weights[-1] = 0.5 / period
        half = period // 2
    else:
        weights = np.full(period, 1.0 / period)
        half = (period - 1) // 2
    core = np.convolve(values, weights, mode="valid")
    trend = np.full(n, np.nan)
    trend[half:n - half] = core
    return trend


def decompose(series: TimeSeries, period: int) -> DecompositionResult:
    """Split a series into seasonal, trend and residual components.

    The seasonal profile is the per-phase mean of the detrended series,
    re-centered to zero mean, so seasonal + trend + residual reproduces the
    input exactly wherever the trend is defined.
    """
    period = int(period)
    if period < 2:
        raise ParameterDomainError(f"period must be >= 2, got {period}")
    n = len(series)
    if n < 2 * period:
        raise InsufficientDataError(
            f"decomposition needs at least {2 * period} samples "
            f"(2 periods), got {n}"
        )
    values = series.values
    trend = _centered_trend(values, period)
    detrended = values - trend

    phase_means = np.empty(period)
    for k in range(period):
        phase_means[k] = np.nanmean(detrended[k::period])
    phase_means -= phase_means.mean()
    seasonal = np.tile(phase_means, n // period + 1)[:n]

    residual = values - trend - seasonal
    return DecompositionResult(
        seasonal=series.with_values(seasonal),
        trend=series.with_values(trend),
        residual=series.with_values(residual),
        period=period,
    )


def residual_series(result: DecompositionResult) -> TimeSeries:
    """Residual component with the undefined edge samples removed.

    This is the series handed to the distribution-fitting stage.
    """
    res = result.residual
    defined = ~np.isnan(res.values)
    if not np.any(defined):
        raise EmptySeriesError("residual has no defined samples")
    first = int(np.argmax(defined))
    last = len(res) - int(np.argmax(defined[::-1]))
    offsets = res.offsets[first:last]
    shift = float(offsets[0])
    return TimeSeries(
        start_time=res.start_time + dt.timedelta(seconds=shift),
        interval=res.interval,
        values=res.values[first:last],
        label=res.label,
        offsets=offsets - shift,
    )
