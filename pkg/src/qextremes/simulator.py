"""Discrete-event simulation of one signalized approach.

The model is a FIFO queue with Poisson arrivals and a deterministic
per-vehicle service headway that is only available during the green phase of
a fixed-cycle signal; the red phase acts as a recurring server vacation.  A
green-to-red switch interrupts any in-progress headway, which restarts fresh
at the next green onset.  The engine is the vacation-adjusted Lindley
recursion over arrival order, which makes traces cheap to generate and easy
to replay independently.

Arrival gaps come from a counter-based Philox stream, so extending the
horizon of a run reproduces the shorter run's arrivals exactly.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, replace

import numpy as np

from .block_maxima import extract_block_maxima
from .decomposition import TimeSeries
from .errors import InsufficientDataError, ParameterDomainError, RankingError
from .distributions import DEFAULT_CATALOG, GEV
from .fitting import RankingTable, rank_candidates

__all__ = [
    "SIM_EPOCH",
    "SignalSimConfig",
    "QueueTrace",
    "GumbelLimitFit",
    "ConvergenceSeedResult",
    "ConvergenceReport",
    "simulate",
    "running_maxima",
    "fit_gumbel_limit",
    "block_maxima_convergence_check",
    "export_trace_csv",
]

# Calendar anchor for exported traces; simulation time t=0 maps here.
SIM_EPOCH = dt.datetime(2018, 1, 1, 0, 0, 0)

_ARRIVAL_CHUNK = 4096


@dataclass(frozen=True)
class SignalSimConfig:
    """Parameters of one simulated signalized approach.

    The cycle starts green: green for ``green_fraction * cycle_length``
    seconds, then red for the remainder.  Stability requires the offered
    load per cycle to stay below the green-time service capacity
    (``arrival_rate < green_fraction / service_headway``); deliberate
    oversaturation studies can set ``allow_oversaturation``.
    """

    arrival_rate: float
    service_headway: float
    cycle_length: float = 120.0
    green_fraction: float = 0.5
    horizon: float = 3600.0
    sample_interval: float = 120.0
    seed: int = 0
    allow_oversaturation: bool = False

    def __post_init__(self):
        if not (self.arrival_rate > 0 and math.isfinite(self.arrival_rate)):
            raise ParameterDomainError(
                f"arrival_rate must be > 0, got {self.arrival_rate!r}"
            )
        if not (self.service_headway > 0 and math.isfinite(self.service_headway)):
            raise ParameterDomainError(
                f"service_headway must be > 0, got {self.service_headway!r}"
            )
        if self.cycle_length <= 0:
            raise ParameterDomainError("cycle_length must be > 0")
        if not 0.0 < self.green_fraction < 1.0:
            raise ParameterDomainError("green_fraction must lie in (0, 1)")
        if self.horizon <= 0:
            raise ParameterDomainError("horizon must be > 0")
        if self.sample_interval <= 0:
            raise ParameterDomainError("sample_interval must be > 0")
        if self.service_headway > self.green_duration:
            raise ParameterDomainError(
                "service_headway exceeds the green duration; no vehicle "
                "could ever complete service"
            )
        if not self.is_stable and not self.allow_oversaturation:
            raise ParameterDomainError(
                "unstable configuration: arrival rate "
                f"{self.arrival_rate} >= capacity "
                f"{self.green_fraction / self.service_headway}; set "
                "allow_oversaturation to simulate it anyway"
            )

    @property
    def green_duration(self) -> float:
        return self.green_fraction * self.cycle_length

    @property
    def is_stable(self) -> bool:
        return self.arrival_rate < self.green_fraction / self.service_headway


@dataclass(frozen=True)
class QueueTrace:
    """One simulation run: per-vehicle events plus sampled queue lengths.

    ``waits`` are arrival-to-departure times of vehicles that departed
    within the horizon; ``arrivals``/``departures`` keep the raw event times
    so conservation and replay checks can audit the run.  Queue length at a
    sample instant counts vehicles that have arrived but not yet departed,
    with events exactly at the instant already counted.
    """

    sampled_lengths: TimeSeries
    waits: np.ndarray
    running_max_lengths: np.ndarray
    running_max_waits: np.ndarray
    config: SignalSimConfig
    arrivals: np.ndarray
    departures: np.ndarray

    def sample_times_s(self) -> np.ndarray:
        """Simulation-time seconds of each queue-length sample."""
        si = self.config.sample_interval
        return si + self.sampled_lengths.offsets


@dataclass(frozen=True)
class GumbelLimitFit:
    """Log-time regression of the running maximum queue length.

    The running maximum of a stable vacation queue grows like
    ``growth_rate * (log t + log_time_scale + Z)`` with Z a standard Gumbel
    fluctuation; ``fluctuations`` holds the standardized regression
    residuals.
    """

    growth_rate: float
    log_time_scale: float
    fluctuations: np.ndarray
    fit_r2: float


def _complete_service(start: float, green: float, cycle: float,
                      headway: float) -> float:
    """Departure time for a service that may start no earlier than ``start``.

    Service needs ``headway`` uninterrupted green seconds; if they do not
    fit before the red switch (or ``start`` is in red), the service restarts
    at the next green onset.  Completion exactly at the green-red switch
    counts as within green.
    """
    k = math.floor(start / cycle)
    tau = start - k * cycle
    if tau <= green - headway:
        return start + headway
    return (k + 1) * cycle + headway


def _draw_arrivals(rate: float, horizon: float, seed: int) -> np.ndarray:
    # Philox is counter-based: consuming gaps strictly in order makes the
    # arrival sequence a prefix-stable function of the seed, so extending
    # the horizon never changes already-realized arrivals.
    rng = np.random.Generator(np.random.Philox(key=seed))
    mean_gap = 1.0 / rate
    chunks = []
    last = 0.0
    while last <= horizon:
        gaps = rng.exponential(mean_gap, size=_ARRIVAL_CHUNK)
        chunk = last + np.cumsum(gaps)
        chunks.append(chunk)
        last = float(chunk[-1])
    arrivals = np.concatenate(chunks)
    return arrivals[arrivals <= horizon]


def simulate(config: SignalSimConfig) -> QueueTrace:
    """Run one trace; identical (config, seed) gives a bit-identical trace."""
    arrivals = _draw_arrivals(config.arrival_rate, config.horizon, config.seed)
    green = config.green_duration
    cycle = config.cycle_length
    headway = config.service_headway

    departures = np.empty(len(arrivals))
    previous = 0.0
    for i, arrival in enumerate(arrivals):
        previous = _complete_service(
            max(arrival, previous), green, cycle, headway
        )
        departures[i] = previous

    n_samples = int(math.floor(config.horizon / config.sample_interval))
    if n_samples == 0:
        raise ParameterDomainError(
            "horizon shorter than one sample_interval; nothing to sample"
        )
    sample_times = config.sample_interval * np.arange(1, n_samples + 1)
    lengths = (
        np.searchsorted(arrivals, sample_times, side="right")
        - np.searchsorted(departures, sample_times, side="right")
    ).astype(float)

    departed = departures <= config.horizon
    waits = (departures - arrivals)[departed]

    sampled = TimeSeries(
        start_time=SIM_EPOCH + dt.timedelta(seconds=config.sample_interval),
        interval=config.sample_interval,
        values=lengths,
        label=f"sim_seed{config.seed}",
    )
    return QueueTrace(
        sampled_lengths=sampled,
        waits=waits,
        running_max_lengths=np.maximum.accumulate(lengths) if len(lengths) else lengths,
        running_max_waits=np.maximum.accumulate(waits) if len(waits) else waits,
        config=config,
        arrivals=arrivals,
        departures=departures,
    )


def running_maxima(trace: QueueTrace) -> tuple[np.ndarray, np.ndarray]:
    """Prefix maxima of the sampled queue lengths and of the waits."""
    lengths = trace.sampled_lengths.values
    if len(lengths) == 0 and len(trace.waits) == 0:
        raise InsufficientDataError("empty trace has no running maxima")
    return (
        np.maximum.accumulate(lengths) if len(lengths) else lengths.copy(),
        np.maximum.accumulate(trace.waits) if len(trace.waits) else trace.waits.copy(),
    )


def fit_gumbel_limit(trace: QueueTrace, t_min: float) -> GumbelLimitFit:
    """Fit the logarithmic growth law of the running maximum queue length.

    Ordinary least squares of the running maximum on log(t) over sample
    instants t >= t_min: the slope is the growth rate and the intercept
    divided by it is the log time scale.  Standardized residuals are
    (max - fit) / growth_rate.
    """
    t = trace.sample_times_s()
    max_lengths = trace.running_max_lengths
    keep = t >= t_min
    if int(np.sum(keep)) < 3:
        raise InsufficientDataError(
            f"need >= 3 samples at t >= {t_min}; got {int(np.sum(keep))}"
        )
    log_t = np.log(t[keep])
    y = max_lengths[keep]
    slope, intercept = np.polyfit(log_t, y, 1)
    predicted = slope * log_t + intercept
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    if slope == 0.0:
        raise ParameterDomainError(
            "running maximum shows no growth; cannot standardize fluctuations"
        )
    return GumbelLimitFit(
        growth_rate=float(slope),
        log_time_scale=float(intercept / slope),
        fluctuations=(y - predicted) / slope,
        fit_r2=r2,
    )


@dataclass(frozen=True)
class ConvergenceSeedResult:
    seed: int
    gev_rank: int | None
    gev_shape: float | None
    n_maxima: int
    diagnostic: str = ""


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-seed GEV ranking outcomes for simulated block maxima."""

    block_size: int
    results: tuple[ConvergenceSeedResult, ...]

    @property
    def gev_rank_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for r in self.results:
            if r.gev_rank is not None:
                counts[r.gev_rank] = counts.get(r.gev_rank, 0) + 1
        return dict(sorted(counts.items()))

    def top_k_fraction(self, k: int = 3) -> float:
        hits = sum(1 for r in self.results if r.gev_rank is not None
                   and r.gev_rank <= k)
        return hits / len(self.results)

    @property
    def shapes(self) -> list[float]:
        return [r.gev_shape for r in self.results if r.gev_shape is not None]


def block_maxima_convergence_check(
    config: SignalSimConfig,
    block_size: int,
    seeds,
    catalog=DEFAULT_CATALOG,
) -> ConvergenceReport:
    """Simulate each seed, extract block maxima, rank the catalog.

    The end-to-end oracle tying the simulator to the fitting stage: for a
    stable signal queue, the per-block maxima of sampled queue lengths
    should keep the GEV family near the top of the RSS ranking.  Seeds whose
    maxima cannot be ranked (for example an all-zero queue) are recorded
    with a diagnostic instead of aborting the sweep.
    """
    results = []
    for seed in seeds:
        trace = simulate(replace(config, seed=int(seed)))
        maxima = extract_block_maxima(trace.sampled_lengths, block_size)
        try:
            table: RankingTable = rank_candidates(
                maxima.maxima, catalog=catalog, label=maxima.source_label
            )
        except (RankingError, InsufficientDataError) as exc:
            results.append(ConvergenceSeedResult(
                seed=int(seed), gev_rank=None, gev_shape=None,
                n_maxima=len(maxima), diagnostic=str(exc),
            ))
            continue
        gev_fit = table.fits.get(GEV)
        results.append(ConvergenceSeedResult(
            seed=int(seed),
            gev_rank=table.rank_of(GEV),
            gev_shape=None if gev_fit is None else gev_fit.params[2],
            n_maxima=len(maxima),
        ))
    return ConvergenceReport(block_size=int(block_size), results=tuple(results))


VEHICLE_SPACING_FT = 25.0


def export_trace_csv(trace: QueueTrace, path,
                     vehicle_spacing: float | None = None) -> None:
    """Write sampled queue lengths in the corridor CSV schema.

    Produces the exact ``timestamp,intersection,queue_length`` layout the
    pipeline ingests, so simulated traces round-trip losslessly.  The queue
    dynamics are integer vehicle counts; pass ``vehicle_spacing`` (feet per
    vehicle, conventionally :data:`VEHICLE_SPACING_FT`) to export distance
    units instead.  The conversion happens only here, at report time.
    """
    if vehicle_spacing is not None and vehicle_spacing <= 0:
        raise ParameterDomainError(
            f"vehicle_spacing must be > 0, got {vehicle_spacing!r}"
        )
    scale = 1.0 if vehicle_spacing is None else float(vehicle_spacing)
    series = trace.sampled_lengths
    times = series.sample_times()
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["timestamp", "intersection", "queue_length"])
        for when, value in zip(times, series.values):
            writer.writerow(
                [when.isoformat(), series.label, repr(float(value) * scale)]
            )
