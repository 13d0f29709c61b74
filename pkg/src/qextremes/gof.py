"""Goodness-of-fit diagnostics: P-P and Q-Q point sets, linearity, KS test."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import kolmogorov

from .errors import DegenerateInputError, InsufficientDataError
from .fitting import FittedDistribution

__all__ = [
    "KS_CAVEAT",
    "GofReport",
    "pp_points",
    "qq_points",
    "linearity_score",
    "diagonal_score",
    "ks_test",
    "gof_report",
]

KS_CAVEAT = (
    "KS p-value uses the asymptotic Kolmogorov distribution without a "
    "parameter-estimation correction; parameters fitted from the same "
    "sample bias the p-value upward."
)


@dataclass(frozen=True)
class GofReport:
    """Graphical-test point sets and scalar summaries for one fitted family.

    ``pp_r2`` and ``qq_r2`` are ordinary-least-squares linearity scores;
    ``pp_diagonal_r2`` additionally scores the P-P points against the exact
    diagonal, which is the stricter reading of a probability plot.
    """

    family: str
    pp_points: np.ndarray
    qq_points: np.ndarray
    pp_r2: float
    qq_r2: float
    pp_diagonal_r2: float
    ks_statistic: float
    ks_p_value: float
    ks_caveat: str = KS_CAVEAT


def _plotting_positions(n: int) -> np.ndarray:
    # Weibull positions k/(n+1): unbiased estimates of the CDF at the order
    # statistics, the customary choice in extreme-value work.
    return np.arange(1, n + 1, dtype=float) / (n + 1)


def pp_points(samples, fitted: FittedDistribution) -> np.ndarray:
    """Probability-probability points (empirical CDF, fitted CDF).

    For the k-th order statistic x(k) the empirical coordinate is k/(n+1)
    and the theoretical one is the fitted CDF at x(k).  Returns an (n, 2)
    array sorted by the first column.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if len(x) < 2:
        raise InsufficientDataError("P-P points need at least 2 samples")
    emp = _plotting_positions(len(x))
    theo = np.asarray(fitted.cdf(x), dtype=float)
    return np.column_stack([emp, theo])


def qq_points(samples, fitted: FittedDistribution) -> np.ndarray:
    """Quantile-quantile points (fitted quantile, sample order statistic)."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if len(x) < 2:
        raise InsufficientDataError("Q-Q points need at least 2 samples")
    theo = np.asarray(fitted.quantile(_plotting_positions(len(x))), dtype=float)
    return np.column_stack([theo, x])


def linearity_score(points) -> float:
    """Coefficient of determination of the OLS line through the points.

    Quantifies the visual "roughly linear" criterion of probability plots.
    Degenerate abscissae (all x equal) leave the line undefined.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise InsufficientDataError("linearity needs >= 3 (x, y) points")
    x, y = pts[:, 0], pts[:, 1]
    sxx = float(np.sum((x - x.mean()) ** 2))
    if sxx <= 0.0:
        raise DegenerateInputError("all abscissae equal; OLS line undefined")
    syy = float(np.sum((y - y.mean()) ** 2))
    if syy <= 0.0:
        return 1.0  # constant ordinates: the flat line fits exactly
    sxy = float(np.sum((x - x.mean()) * (y - y.mean())))
    return sxy * sxy / (sxx * syy)


def diagonal_score(points) -> float:
    """R-squared of the points against the exact y = x diagonal."""
    pts = np.asarray(points, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    syy = float(np.sum((y - y.mean()) ** 2))
    if syy <= 0.0:
        return 1.0 if np.allclose(y, x) else 0.0
    return 1.0 - float(np.sum((y - x) ** 2)) / syy


def ks_test(samples, fitted: FittedDistribution) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov statistic and asymptotic p-value.

    The statistic is sup|F_emp - F_fit| over the sample; the p-value comes
    from the asymptotic Kolmogorov distribution.  See :data:`KS_CAVEAT` for
    the estimated-parameter bias.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = len(x)
    if n < 10:
        raise InsufficientDataError("KS test needs at least 10 samples")
    cdf = np.asarray(fitted.cdf(x), dtype=float)
    grid = np.arange(n, dtype=float)
    d_plus = np.max((grid + 1.0) / n - cdf)
    d_minus = np.max(cdf - grid / n)
    statistic = float(max(d_plus, d_minus, 0.0))
    p_value = float(kolmogorov(np.sqrt(n) * statistic))
    return statistic, p_value


def gof_report(samples, fitted: FittedDistribution) -> GofReport:
    """Assemble the full diagnostic report for one fitted family."""
    pp = pp_points(samples, fitted)
    qq = qq_points(samples, fitted)
    statistic, p_value = ks_test(samples, fitted)
    return GofReport(
        family=fitted.family,
        pp_points=pp,
        qq_points=qq,
        pp_r2=linearity_score(pp),
        qq_r2=linearity_score(qq),
        pp_diagonal_r2=diagonal_score(pp),
        ks_statistic=statistic,
        ks_p_value=p_value,
    )
