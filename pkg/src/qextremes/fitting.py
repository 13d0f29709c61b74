"""Maximum-likelihood fitting, RSS scoring and best-fit ranking.

Every catalog family is fitted with the same derivative-free recipe: a
method-of-moments starting point refined by Nelder-Mead on the negative log
likelihood, with out-of-support parameter vectors penalized by a large
sentinel instead of raising.  Candidates are then scored by the residual sum
of squares between the empirical density histogram and the fitted density at
the bin centers, and ranked ascending.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .distributions import DEFAULT_CATALOG, Family, get_family
from .errors import InsufficientDataError, ParameterDomainError, RankingError

__all__ = [
    "MIN_HISTOGRAM_SAMPLES",
    "MIN_FIT_SAMPLES",
    "Histogram",
    "FittedDistribution",
    "FitFailure",
    "RankingEntry",
    "RankingTable",
    "make_histogram",
    "fit_mle",
    "compute_rss",
    "rank_candidates",
]

MIN_HISTOGRAM_SAMPLES = 10
MIN_FIT_SAMPLES = 30

# Penalty returned for parameter vectors outside the family domain or with
# samples outside the support; large enough to dominate any real likelihood,
# finite so the simplex arithmetic stays clean.
_NLL_SENTINEL = 1e15

_MAX_ITER = 2000
_PARAM_TOL = 1e-8
_FUNC_TOL = 1e-10


@dataclass(frozen=True)
class Histogram:
    """Density-normalized histogram: sum(density * width) == 1."""

    bin_edges: np.ndarray
    densities: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=float)
        dens = np.asarray(self.densities, dtype=float)
        if len(edges) < 2 or len(dens) != len(edges) - 1:
            raise ParameterDomainError(
                "histogram needs len(bin_edges) == len(densities) + 1 >= 2"
            )
        if np.any(np.diff(edges) <= 0):
            raise ParameterDomainError("bin edges must be strictly increasing")
        if np.any(dens < 0):
            raise ParameterDomainError("densities must be non-negative")
        total = float(np.sum(dens * np.diff(edges)))
        if abs(total - 1.0) > 1e-9:
            raise ParameterDomainError(
                f"histogram is not density-normalized (integral {total!r})"
            )
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "densities", dens)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)


@dataclass(frozen=True)
class FittedDistribution:
    """A fitted candidate: family, parameters, likelihood and RSS score."""

    family: str
    params: tuple[float, ...]
    log_likelihood: float
    rss: float
    sample_count: int

    def _family(self) -> Family:
        return get_family(self.family)

    def cdf(self, x):
        return self._family().cdf(x, self.params)

    def pdf(self, x):
        return self._family().pdf(x, self.params)

    def quantile(self, p):
        return self._family().quantile(p, self.params)


@dataclass(frozen=True)
class FitFailure:
    """Recorded instead of a fit when a family cannot be estimated."""

    family: str
    reason: str


@dataclass(frozen=True)
class RankingEntry:
    rank: int
    family: str
    rss: float


@dataclass(frozen=True)
class RankingTable:
    """Candidates ordered ascending by RSS; exact RSS ties share a rank.

    ``fits`` keeps the successful fitted distributions so downstream
    diagnostics do not have to refit, and ``failures`` records the families
    excluded from the ranking.
    """

    intersection_label: str
    entries: tuple[RankingEntry, ...]
    failures: tuple[FitFailure, ...] = ()
    fits: dict[str, FittedDistribution] = field(default_factory=dict, repr=False)

    def best(self) -> RankingEntry:
        return self.entries[0]

    def rank_of(self, family: str) -> int | None:
        for entry in self.entries:
            if entry.family == family:
                return entry.rank
        return None


def make_histogram(samples, binning="fd") -> Histogram:
    """Density histogram of ``samples`` under a binning rule.

    ``binning`` is either the string ``"fd"`` (Freedman-Diaconis bin width,
    2*IQR*n**(-1/3), the default) or an explicit bin count.  Degenerate
    samples (zero IQR or zero range) collapse to a single unit-width bin.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1:
        x = x.ravel()
    if len(x) < MIN_HISTOGRAM_SAMPLES:
        raise InsufficientDataError(
            f"histogram needs >= {MIN_HISTOGRAM_SAMPLES} samples, got {len(x)}"
        )
    if not np.all(np.isfinite(x)):
        raise ParameterDomainError("histogram samples must be finite")
    lo, hi = float(np.min(x)), float(np.max(x))
    if hi <= lo:
        edges = np.array([lo - 0.5, lo + 0.5])
    elif binning == "fd":
        q75, q25 = np.percentile(x, [75.0, 25.0])
        width = 2.0 * (q75 - q25) * len(x) ** (-1.0 / 3.0)
        if width <= 0:
            edges = np.array([lo - 0.5, hi + 0.5])
        else:
            n_bins = max(1, math.ceil((hi - lo) / width))
            edges = np.linspace(lo, hi, n_bins + 1)
    else:
        n_bins = int(binning)
        if n_bins < 1:
            raise ParameterDomainError(f"bin count must be >= 1, got {binning!r}")
        edges = np.linspace(lo, hi, n_bins + 1)
    densities, edges = np.histogram(x, bins=edges, density=True)
    return Histogram(bin_edges=edges, densities=densities)


def _negative_log_likelihood(family: Family, x: np.ndarray, params) -> float:
    params = tuple(float(v) for v in params)
    if not all(math.isfinite(v) for v in params) or not family.in_domain(params):
        return _NLL_SENTINEL
    with np.errstate(all="ignore"):
        logpdf = family.logpdf(x, params)
    total = float(np.sum(logpdf))
    if not math.isfinite(total):
        # Some sample lies outside the support at these parameters.
        return _NLL_SENTINEL
    return -total


def fit_mle(samples, family: str, binning="fd",
            histogram: Histogram | None = None):
    """Fit one family by maximum likelihood.

    Runs Nelder-Mead (max 2000 iterations, parameter tolerance 1e-8,
    function tolerance 1e-10) on the negative log likelihood from the
    family's method-of-moments start.  Returns a
    :class:`FittedDistribution`, or a :class:`FitFailure` record when the
    sample is degenerate, the support cannot accommodate the data, or the
    optimizer does not converge; failures are data for the ranking, not
    exceptions.

    ``histogram`` lets callers share one empirical histogram across several
    fits; by default the sample's own ``binning`` histogram scores the RSS.
    """
    fam = get_family(family)
    x = np.asarray(samples, dtype=float).ravel()
    if len(x) < MIN_FIT_SAMPLES:
        raise InsufficientDataError(
            f"fitting needs >= {MIN_FIT_SAMPLES} samples, got {len(x)}"
        )
    if not np.all(np.isfinite(x)):
        raise ParameterDomainError("samples must be finite")
    if np.ptp(x) == 0.0:
        return FitFailure(fam.name, "degenerate sample: zero variance")

    try:
        start = tuple(float(v) for v in fam.mom_start(x))
    except (ValueError, FloatingPointError, ZeroDivisionError) as exc:
        return FitFailure(fam.name, f"moment start failed: {exc}")
    start_nll = _negative_log_likelihood(fam, x, start)
    if start_nll >= _NLL_SENTINEL:
        return FitFailure(
            fam.name, "sample outside the family support at the moment start"
        )

    result = optimize.minimize(
        lambda p: _negative_log_likelihood(fam, x, p),
        np.asarray(start, dtype=float),
        method="Nelder-Mead",
        options={
            "maxiter": _MAX_ITER,
            "maxfev": 10 * _MAX_ITER,
            "xatol": _PARAM_TOL,
            "fatol": _FUNC_TOL,
        },
    )
    if not result.success:
        return FitFailure(
            fam.name, f"optimizer did not converge: {result.message}"
        )
    params = tuple(float(v) for v in result.x)
    final_nll = _negative_log_likelihood(fam, x, params)
    if final_nll >= _NLL_SENTINEL:
        return FitFailure(fam.name, "optimizer terminated outside the support")

    if histogram is None:
        histogram = make_histogram(x, binning)
    fitted = FittedDistribution(
        family=fam.name,
        params=params,
        log_likelihood=-final_nll,
        rss=0.0,
        sample_count=len(x),
    )
    rss = compute_rss(histogram, fitted)
    return FittedDistribution(
        family=fam.name,
        params=params,
        log_likelihood=-final_nll,
        rss=rss,
        sample_count=len(x),
    )


def compute_rss(hist: Histogram, fitted: FittedDistribution) -> float:
    """Residual sum of squares between empirical and fitted density.

    Sum over bins of (empirical density at the bin center minus fitted pdf
    at the bin center) squared.
    """
    get_family(fitted.family).validate(fitted.params)
    with np.errstate(all="ignore"):
        predicted = np.asarray(fitted.pdf(hist.centers), dtype=float)
    predicted = np.where(np.isfinite(predicted), predicted, 0.0)
    return float(np.sum((hist.densities - predicted) ** 2))


def rank_candidates(samples, catalog=DEFAULT_CATALOG, binning="fd",
                    label: str = "",
                    histogram: Histogram | None = None) -> RankingTable:
    """Fit every catalog family and rank the successes ascending by RSS.

    Exact RSS ties share a rank number (and are tie-broken alphabetically in
    the listing order); failed families are excluded but recorded.  All
    families failing raises :class:`RankingError`.  Passing ``histogram``
    scores every family against that one empirical density, which report
    emission relies on to plot the same bins the ranking used.
    """
    x = np.asarray(samples, dtype=float).ravel()
    hist = histogram
    if hist is None and len(x) >= MIN_HISTOGRAM_SAMPLES \
            and np.all(np.isfinite(x)) and np.ptp(x) > 0:
        hist = make_histogram(x, binning)

    fits: dict[str, FittedDistribution] = {}
    failures: list[FitFailure] = []
    for family in catalog:
        outcome = fit_mle(x, family, binning=binning, histogram=hist)
        if isinstance(outcome, FitFailure):
            failures.append(outcome)
        else:
            fits[family] = outcome
    if not fits:
        raise RankingError(
            f"no candidate family could be fitted for {label or 'sample'}: "
            + "; ".join(f"{f.family}: {f.reason}" for f in failures)
        )

    ordered = sorted(fits.values(), key=lambda f: (f.rss, f.family))
    entries = []
    rank = 0
    previous_rss = None
    for position, fit in enumerate(ordered, start=1):
        if fit.rss != previous_rss:
            rank = position
            previous_rss = fit.rss
        entries.append(RankingEntry(rank=rank, family=fit.family, rss=fit.rss))
    return RankingTable(
        intersection_label=label,
        entries=tuple(entries),
        failures=tuple(sorted(failures, key=lambda f: f.family)),
        fits=fits,
    )
