"""Generalized extreme value distribution and the comparison-family catalog.

The GEV family (location ``mu``, scale ``sigma``, shape ``xi``) is evaluated
with closed forms written here; the comparison families used for ranking are
thin wrappers over ``scipy.stats`` registered in :data:`FAMILIES` so that the
catalog can be extended without touching the fitting code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import stats
from scipy.special import polygamma, psi

from .errors import ParameterDomainError

__all__ = [
    "XI_EPS",
    "GEV",
    "GUMBEL",
    "FRECHET",
    "WEIBULL_MAX",
    "GevParams",
    "Family",
    "FAMILIES",
    "COMPARISON_FAMILIES",
    "DEFAULT_CATALOG",
    "gev_cdf",
    "gev_pdf",
    "gev_logpdf",
    "gev_logcdf",
    "gev_quantile",
    "classify_family",
    "catalog_cdf",
    "get_family",
]

# Shape values within XI_EPS of zero are treated as the Gumbel limit; the
# general branch suffers catastrophic cancellation in (1 + xi*z)**(-1/xi)
# long before |xi| reaches this threshold.
XI_EPS = 1e-8

# GEV sub-family tags (classification of a fitted shape parameter).
GUMBEL = "gumbel"
FRECHET = "frechet"
WEIBULL_MAX = "weibull_max"

# Catalog family names follow the customary scipy.stats abbreviations so that
# ranking tables read like the usual fitting-package output.
GEV = "genextreme"


@dataclass(frozen=True)
class GevParams:
    """Location/scale/shape triple for the GEV family.

    ``scale`` must be strictly positive; all fields must be finite.
    """

    location: float
    scale: float
    shape: float = 0.0

    def __post_init__(self):
        for name in ("location", "scale", "shape"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ParameterDomainError(f"GEV {name} must be finite, got {v!r}")
        if self.scale <= 0:
            raise ParameterDomainError(f"GEV scale must be > 0, got {self.scale!r}")

    @property
    def is_gumbel(self) -> bool:
        return abs(self.shape) <= XI_EPS

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.location, self.scale, self.shape)


def _standardize(x, params: GevParams):
    x = np.asarray(x, dtype=float)
    return (x - params.location) / params.scale


def gev_cdf(x, params: GevParams):
    """GEV cumulative distribution function.

    Evaluates exp{-[1 + xi*(x-mu)/sigma]**(-1/xi)} on the support, with the
    Gumbel limit exp{-exp[-(x-mu)/sigma]} for |xi| <= XI_EPS.  Outside the
    support the CDF is hard 0 (below the lower endpoint, xi > 0) or hard 1
    (above the upper endpoint, xi < 0); fitting optimizers probe such points,
    so no error is raised.

    Accepts scalars or arrays; returns matching shape.
    """
    z = _standardize(x, params)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if params.is_gumbel:
        out = np.exp(-np.exp(-z))
    else:
        xi = params.shape
        s = 1.0 + xi * z
        out = np.empty_like(z)
        inside = s > 0
        # log1p keeps (1 + xi*z)**(-1/xi) accurate for tiny |xi|.
        out[inside] = np.exp(-np.exp(-np.log1p(xi * z[inside]) / xi))
        out[~inside] = 0.0 if xi > 0 else 1.0
    return float(out[0]) if scalar else out


def gev_logcdf(x, params: GevParams):
    """log CDF of the GEV; -inf below a xi>0 lower endpoint."""
    z = _standardize(x, params)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if params.is_gumbel:
        out = -np.exp(-z)
    else:
        xi = params.shape
        s = 1.0 + xi * z
        out = np.empty_like(z)
        inside = s > 0
        out[inside] = -np.exp(-np.log1p(xi * z[inside]) / xi)
        out[~inside] = -np.inf if xi > 0 else 0.0
    return float(out[0]) if scalar else out


def gev_logpdf(x, params: GevParams):
    """log density of the GEV; -inf outside the support."""
    z = _standardize(x, params)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    log_scale = math.log(params.scale)
    if params.is_gumbel:
        # exp(-z) overflowing to inf for deep-left tails is the correct
        # limit here: the log density goes to -inf.
        with np.errstate(over="ignore"):
            out = -z - np.exp(-z) - log_scale
    else:
        xi = params.shape
        s = 1.0 + xi * z
        out = np.full_like(z, -np.inf)
        inside = s > 0
        ls = np.log1p(xi * z[inside])
        # pdf = (1/sigma) * s**(-1/xi - 1) * exp(-s**(-1/xi))
        out[inside] = -(1.0 / xi + 1.0) * ls - np.exp(-ls / xi) - log_scale
    return float(out[0]) if scalar else out


def gev_pdf(x, params: GevParams):
    """GEV probability density; zero outside the support."""
    return np.exp(gev_logpdf(x, params))


def gev_quantile(p, params: GevParams):
    """Inverse of :func:`gev_cdf` for probabilities strictly inside (0, 1).

    The Gumbel branch is mu - sigma*ln(-ln p); the general branch uses
    expm1 so that it degrades gracefully into the Gumbel branch as xi -> 0.
    """
    p = np.asarray(p, dtype=float)
    scalar = p.ndim == 0
    p = np.atleast_1d(p)
    if np.any((p <= 0.0) | (p >= 1.0)) or not np.all(np.isfinite(p)):
        raise ParameterDomainError("quantile probabilities must lie in (0, 1)")
    loglog = np.log(-np.log(p))
    if params.is_gumbel:
        out = params.location - params.scale * loglog
    else:
        xi = params.shape
        out = params.location + params.scale * np.expm1(-xi * loglog) / xi
    return float(out[0]) if scalar else out


def classify_family(params: GevParams) -> str:
    """Map a shape parameter to its extreme-value sub-family tag.

    Shapes within XI_EPS of zero are Gumbel; larger positive shapes are
    Frechet; more negative shapes are Weibull (max) type.
    """
    if params.is_gumbel:
        return GUMBEL
    return FRECHET if params.shape > 0 else WEIBULL_MAX


# --------------------------------------------------------------------------
# Comparison-family catalog
# --------------------------------------------------------------------------

_EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class Family:
    """One entry of the distribution catalog.

    ``params`` everywhere is a flat tuple in the order of ``param_names``.
    ``mom_start`` produces a moment-based starting point for likelihood
    maximization and may assume at least two distinct finite samples.
    """

    name: str
    param_names: tuple[str, ...]
    in_domain: Callable[[Sequence[float]], bool]
    cdf: Callable[[np.ndarray, Sequence[float]], np.ndarray]
    pdf: Callable[[np.ndarray, Sequence[float]], np.ndarray]
    logpdf: Callable[[np.ndarray, Sequence[float]], np.ndarray]
    quantile: Callable[[np.ndarray, Sequence[float]], np.ndarray]
    mom_start: Callable[[np.ndarray], tuple[float, ...]]

    @property
    def n_params(self) -> int:
        return len(self.param_names)

    def validate(self, params: Sequence[float]) -> None:
        params = tuple(float(v) for v in params)
        if len(params) != self.n_params:
            raise ParameterDomainError(
                f"{self.name} expects {self.n_params} parameters "
                f"{self.param_names}, got {len(params)}"
            )
        if not all(math.isfinite(v) for v in params) or not self.in_domain(params):
            raise ParameterDomainError(
                f"parameters {params!r} outside the domain of {self.name}"
            )


def _gumbel_moments(x) -> tuple[float, float]:
    s = float(np.std(x, ddof=1))
    scale0 = s * math.sqrt(6.0) / math.pi
    return (float(np.mean(x)) - _EULER_GAMMA * scale0, scale0)


def _gev_subfamily(name: str, shape0: float) -> Family:
    """GEV restricted to one extreme-value type.

    ``gumbel`` pins the shape at zero (two free parameters); ``frechet`` and
    ``weibull_max`` keep the shape free but restricted to the positive or the
    negative side.
    """
    if name == GUMBEL:
        as_gev = lambda p: GevParams(p[0], p[1], 0.0)
        param_names = ("location", "scale")
        mom_start = _gumbel_moments
        in_domain = lambda p: p[1] > 0
    else:
        sign = 1.0 if shape0 > 0 else -1.0
        as_gev = lambda p: GevParams(*p)
        param_names = ("location", "scale", "shape")
        mom_start = lambda x: _gumbel_moments(x) + (shape0,)
        in_domain = lambda p: p[1] > 0 and sign * p[2] > XI_EPS
    return Family(
        name=name,
        param_names=param_names,
        in_domain=in_domain,
        cdf=lambda x, p: gev_cdf(x, as_gev(p)),
        pdf=lambda x, p: gev_pdf(x, as_gev(p)),
        logpdf=lambda x, p: gev_logpdf(x, as_gev(p)),
        quantile=lambda q, p: gev_quantile(q, as_gev(p)),
        mom_start=mom_start,
    )


def _gev_family() -> Family:
    def mom_start(x):
        # Gumbel method of moments, with a mildly Frechet shape seed so the
        # simplex can move in either direction.
        return _gumbel_moments(x) + (0.1,)

    def in_domain(p):
        return p[1] > 0

    return Family(
        name=GEV,
        param_names=("location", "scale", "shape"),
        in_domain=in_domain,
        cdf=lambda x, p: gev_cdf(x, GevParams(*p)),
        pdf=lambda x, p: gev_pdf(x, GevParams(*p)),
        logpdf=lambda x, p: gev_logpdf(x, GevParams(*p)),
        quantile=lambda q, p: gev_quantile(q, GevParams(*p)),
        mom_start=mom_start,
    )


def _scipy_family(name, dist, param_names, in_domain, mom_start) -> Family:
    return Family(
        name=name,
        param_names=param_names,
        in_domain=in_domain,
        cdf=lambda x, p: dist.cdf(np.asarray(x, dtype=float), *p),
        pdf=lambda x, p: dist.pdf(np.asarray(x, dtype=float), *p),
        logpdf=lambda x, p: dist.logpdf(np.asarray(x, dtype=float), *p),
        quantile=lambda q, p: dist.ppf(np.asarray(q, dtype=float), *p),
        mom_start=mom_start,
    )


def _spread(x):
    lo = float(np.min(x))
    hi = float(np.max(x))
    r = hi - lo
    if r <= 0:
        r = max(abs(lo), 1.0)
    return lo, hi, r


def _build_catalog() -> dict[str, Family]:
    scale_pos = lambda p: p[-1] > 0

    def norm_start(x):
        return (float(np.mean(x)), float(np.std(x, ddof=1)))

    def lognorm_start(x):
        lo, _, r = _spread(x)
        loc0 = lo - 0.05 * r
        logs = np.log(x - loc0)
        return (max(float(np.std(logs, ddof=1)), 1e-3), loc0,
                float(np.exp(np.mean(logs))))

    def logistic_start(x):
        return (float(np.mean(x)), float(np.std(x, ddof=1)) * math.sqrt(3.0) / math.pi)

    def loggamma_start(x):
        # Standard loggamma(c) has mean psi(c) and variance psi'(c).
        c0 = 2.0
        sd = math.sqrt(float(polygamma(1, c0)))
        scale0 = float(np.std(x, ddof=1)) / sd
        loc0 = float(np.mean(x)) - float(psi(c0)) * scale0
        return (c0, loc0, scale0)

    def gamma_start(x):
        lo, _, r = _spread(x)
        loc0 = lo - 0.05 * r
        y = x - loc0
        m, v = float(np.mean(y)), float(np.var(y, ddof=1))
        return (max(m * m / v, 0.1), loc0, v / m)

    def beta_start(x):
        # Four-parameter method of moments (Pearson system): match mean,
        # variance, skewness and kurtosis.  With r = a + b,
        #   r = 6(b2 - b1 - 1) / (6 + 3 b1 - 2 b2)
        #   a, b = r/2 (1 -+ 1 / sqrt(1 + 16 (r+1) / ((r+2)^2 b1)))
        # where b1 is squared skewness and b2 is kurtosis.  The smaller
        # root goes to the parameter on the side the density leans away
        # from, so skew > 0 puts it on a.  The solve is undefined when the
        # sample moments fall outside the beta region (denominator <= 0,
        # r <= 0, or a shape coming out non-positive); only then fall back
        # to a hull-anchored start so right-skewed data stays reachable.
        m = float(np.mean(x))
        v = float(np.var(x, ddof=1))
        b1 = float(stats.skew(x)) ** 2
        b2 = float(stats.kurtosis(x, fisher=False))
        denom = 6.0 + 3.0 * b1 - 2.0 * b2
        if denom > 0:
            r = 6.0 * (b2 - b1 - 1.0) / denom
            if r > 0:
                if b1 == 0:
                    a, b = r / 2.0, r / 2.0
                else:
                    half = 0.5 / math.sqrt(1.0 + 16.0 * (r + 1.0) / ((r + 2.0) ** 2 * b1))
                    small, large = r * (0.5 - half), r * (0.5 + half)
                    a, b = (small, large) if float(stats.skew(x)) > 0 else (large, small)
                if a > 0 and b > 0:
                    scale0 = math.sqrt(v * r * r * (r + 1.0) / (a * b))
                    return (a, b, m - scale0 * a / r, scale0)
        lo, hi, r = _spread(x)
        loc0 = lo - 0.025 * r
        scale0 = hi + 0.025 * r - loc0
        u = (x - loc0) / scale0
        mu, vu = float(np.mean(u)), float(np.var(u, ddof=1))
        common = max(mu * (1.0 - mu) / vu - 1.0, 0.1)
        return (max(mu * common, 0.1), max((1.0 - mu) * common, 0.1), loc0, scale0)

    def expon_start(x):
        lo, _, r = _spread(x)
        loc0 = lo - 0.01 * r
        return (loc0, float(np.mean(x)) - loc0)

    def pareto_start(x):
        lo, _, r = _spread(x)
        loc0 = lo - 0.5 * r
        scale0 = lo - loc0 - 0.01 * r
        mean_y = float(np.mean(x)) - loc0
        b0 = mean_y / (mean_y - scale0) if mean_y > scale0 * 1.05 else 1.5
        return (max(b0, 1.1), loc0, max(scale0, 1e-6 * r))

    def t_start(x):
        df0 = 5.0
        return (df0, float(np.mean(x)),
                float(np.std(x, ddof=1)) * math.sqrt((df0 - 2.0) / df0))

    def dweibull_start(x):
        return (2.0, float(np.median(x)), float(np.std(x, ddof=1)))

    def uniform_start(x):
        lo, hi, r = _spread(x)
        return (lo - 0.01 * r, r * 1.02)

    catalog = {
        GEV: _gev_family(),
        GUMBEL: _gev_subfamily(GUMBEL, 0.0),
        FRECHET: _gev_subfamily(FRECHET, 0.2),
        WEIBULL_MAX: _gev_subfamily(WEIBULL_MAX, -0.2),
    }
    for fam in (
        _scipy_family("norm", stats.norm, ("loc", "scale"), scale_pos, norm_start),
        _scipy_family("lognorm", stats.lognorm, ("s", "loc", "scale"),
                      lambda p: p[0] > 0 and p[2] > 0, lognorm_start),
        _scipy_family("logistic", stats.logistic, ("loc", "scale"),
                      scale_pos, logistic_start),
        _scipy_family("loggamma", stats.loggamma, ("c", "loc", "scale"),
                      lambda p: p[0] > 0 and p[2] > 0, loggamma_start),
        _scipy_family("gamma", stats.gamma, ("a", "loc", "scale"),
                      lambda p: p[0] > 0 and p[2] > 0, gamma_start),
        _scipy_family("beta", stats.beta, ("a", "b", "loc", "scale"),
                      lambda p: p[0] > 0 and p[1] > 0 and p[3] > 0, beta_start),
        _scipy_family("expon", stats.expon, ("loc", "scale"), scale_pos, expon_start),
        _scipy_family("pareto", stats.pareto, ("b", "loc", "scale"),
                      lambda p: p[0] > 0 and p[2] > 0, pareto_start),
        _scipy_family("t", stats.t, ("df", "loc", "scale"),
                      lambda p: p[0] > 0 and p[2] > 0, t_start),
        _scipy_family("dweibull", stats.dweibull, ("c", "loc", "scale"),
                      lambda p: p[0] > 0 and p[2] > 0, dweibull_start),
        _scipy_family("uniform", stats.uniform, ("loc", "scale"),
                      scale_pos, uniform_start),
    ):
        catalog[fam.name] = fam
    return catalog


FAMILIES: dict[str, Family] = _build_catalog()

_SUBFAMILIES = (GUMBEL, FRECHET, WEIBULL_MAX)

COMPARISON_FAMILIES: tuple[str, ...] = tuple(
    n for n in FAMILIES if n != GEV and n not in _SUBFAMILIES
)

# The default ranking catalog: GEV plus the popular comparison set.  The
# constrained GEV sub-families stay out of the ranking (they would only
# duplicate the unconstrained fit) but remain fittable for diagnostics.
DEFAULT_CATALOG: tuple[str, ...] = (GEV,) + COMPARISON_FAMILIES


def get_family(tag: str | Family) -> Family:
    if isinstance(tag, Family):
        return tag
    try:
        return FAMILIES[tag]
    except KeyError:
        raise ParameterDomainError(f"unknown distribution family {tag!r}") from None


def catalog_cdf(x, tag: str, params: Sequence[float]):
    """CDF of a named catalog family at ``x`` under ``params``.

    Raises :class:`ParameterDomainError` for unknown tags or parameters
    outside the family's domain.
    """
    family = get_family(tag)
    family.validate(params)
    return family.cdf(x, tuple(float(v) for v in params))
