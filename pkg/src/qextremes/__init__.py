"""Extreme value analysis of signalized-intersection queue lengths.

Decomposes queue-length time series, extracts block maxima and residuals,
fits and ranks candidate distributions by RSS, runs P-P/Q-Q and KS
diagnostics, and validates the Gumbel limit law of running queue maxima
against a built-in signal-queue simulator.
"""

from .block_maxima import BlockMaximaSeries, extract_block_maxima, extract_block_minima
from .decomposition import (
    DecompositionResult,
    TimeSeries,
    active_hours_filter,
    decompose,
    residual_series,
)
from .distributions import (
    DEFAULT_CATALOG,
    FAMILIES,
    FRECHET,
    GEV,
    GUMBEL,
    WEIBULL_MAX,
    XI_EPS,
    Family,
    GevParams,
    catalog_cdf,
    classify_family,
    gev_cdf,
    gev_logpdf,
    gev_pdf,
    gev_quantile,
)
from .errors import (
    DegenerateInputError,
    EmptySeriesError,
    InsufficientDataError,
    ParameterDomainError,
    QExtremesError,
    RankingError,
    SchemaError,
)
from .fitting import (
    FitFailure,
    FittedDistribution,
    Histogram,
    RankingEntry,
    RankingTable,
    compute_rss,
    fit_mle,
    make_histogram,
    rank_candidates,
)
from .gof import GofReport, gof_report, ks_test, linearity_score, pp_points, qq_points
from .pipeline import (
    CSV_HEADER,
    AnalysisReport,
    CleaningPolicy,
    CorridorDataset,
    IntersectionResult,
    PipelineConfig,
    SeriesDiagnostic,
    emit_report,
    format_ranking_cell,
    ingest_csv,
    run_pipeline,
)
from .simulator import (
    ConvergenceReport,
    GumbelLimitFit,
    QueueTrace,
    SignalSimConfig,
    block_maxima_convergence_check,
    export_trace_csv,
    fit_gumbel_limit,
    running_maxima,
    simulate,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
