"""End-to-end corridor analysis: ingest, clean, decompose, fit, rank, report.

The orchestration layer chains the library stages over one or many
intersections: CSV ingestion with declared cleaning rules, active-hours
filtering, seasonal decomposition, block-maxima extraction, candidate
ranking by RSS and goodness-of-fit diagnostics.  A failing intersection
produces a diagnostic entry instead of aborting the batch, and identical
inputs always produce identical report files (the provenance timestamp is
isolated to a single JSON field so determinism checks can exclude it).
"""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import io
import json
import re
from dataclasses import dataclass, field, asdict
from xml.sax.saxutils import escape as xml_escape

import numpy as np

from .block_maxima import extract_block_maxima
from .decomposition import (
    DEFAULT_DAY_END,
    DEFAULT_DAY_START,
    DecompositionResult,
    TimeSeries,
    active_hours_filter,
    decompose,
    residual_series,
)
from .distributions import DEFAULT_CATALOG, GEV, GUMBEL, get_family
from .errors import EmptySeriesError, ParameterDomainError, SchemaError
from .fitting import (
    FitFailure,
    Histogram,
    RankingTable,
    fit_mle,
    make_histogram,
    rank_candidates,
)
from .gof import GofReport, gof_report

__all__ = [
    "CSV_HEADER",
    "AnalysisReport",
    "CleaningPolicy",
    "CorridorDataset",
    "IntersectionResult",
    "PipelineConfig",
    "SeriesDiagnostic",
    "emit_report",
    "format_ranking_cell",
    "ingest_csv",
    "run_pipeline",
]

CSV_HEADER = "timestamp,intersection,queue_length"

# Seconds of slack when deciding whether a timestamp step is an integer
# multiple of the base interval.
_STEP_TOL = 1e-6


@dataclass(frozen=True)
class CleaningPolicy:
    """Declared ingestion cleaning rules.

    negative: "reject" fails ingestion on a negative queue length,
        "clamp" replaces it with zero and records a diagnostic.
    gaps: "reject" fails on missing samples in the uniform grid,
        "ffill" forward-fills runs of up to ``gap_limit`` missing samples.
    stuck_threshold: runs of one repeated value longer than this are
        flagged in the dataset diagnostics (never altered).
    bad_row_tolerance: number of unparseable data rows that may be
        dropped (with a diagnostic) before ingestion fails.
    """

    negative: str = "reject"
    gaps: str = "reject"
    gap_limit: int = 0
    stuck_threshold: int = 30
    bad_row_tolerance: int = 0

    def __post_init__(self):
        if self.negative not in ("reject", "clamp"):
            raise ParameterDomainError(
                f"negative policy must be 'reject' or 'clamp', got {self.negative!r}"
            )
        if self.gaps not in ("reject", "ffill"):
            raise ParameterDomainError(
                f"gap policy must be 'reject' or 'ffill', got {self.gaps!r}"
            )
        if self.gap_limit < 0 or self.stuck_threshold < 1 or self.bad_row_tolerance < 0:
            raise ParameterDomainError("cleaning thresholds out of range")


@dataclass(frozen=True)
class CorridorDataset:
    """One series per intersection approach plus per-label metadata."""

    series: tuple[TimeSeries, ...]
    metadata: dict[str, dict] = field(default_factory=dict)
    diagnostics: tuple[str, ...] = ()

    def __post_init__(self):
        labels = [s.label for s in self.series]
        if len(set(labels)) != len(labels):
            raise SchemaError("intersection labels must be unique")
        intervals = {float(s.interval) for s in self.series}
        if len(intervals) > 1:
            raise SchemaError(
                f"all series must share one sampling interval, got {sorted(intervals)}"
            )

    def labels(self) -> list[str]:
        return sorted(s.label for s in self.series)

    def get(self, label: str) -> TimeSeries:
        for s in self.series:
            if s.label == label:
                return s
        raise KeyError(label)


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs for the per-intersection analysis chain.

    ``gof_families`` empty means "best-ranked family plus gumbel", the
    default diagnostic pair.
    """

    seasonal_period: int = 450
    active_window: tuple[str, str] = (DEFAULT_DAY_START, DEFAULT_DAY_END)
    block_size: int = 1
    binning: int | str = "fd"
    catalog: tuple[str, ...] = DEFAULT_CATALOG
    gof_families: tuple[str, ...] = ()

    def __post_init__(self):
        if self.seasonal_period < 2:
            raise ParameterDomainError(
                f"seasonal_period must be >= 2, got {self.seasonal_period}"
            )
        if self.block_size < 1:
            raise ParameterDomainError(
                f"block_size must be >= 1, got {self.block_size}"
            )
        for tag in tuple(self.catalog) + tuple(self.gof_families):
            get_family(tag)


@dataclass(frozen=True)
class SeriesDiagnostic:
    """Why one intersection produced no (or partial) results."""

    label: str
    stage: str
    message: str


@dataclass(frozen=True)
class IntersectionResult:
    """Everything the report emits for one successfully analyzed series."""

    label: str
    decomposition: dict
    ranking: RankingTable
    gof_reports: tuple[GofReport, ...]
    histogram: Histogram
    gof_fits: dict = field(default_factory=dict, repr=False)
    pp_sets: dict[str, np.ndarray] = field(default_factory=dict, repr=False)
    qq_sets: dict[str, np.ndarray] = field(default_factory=dict, repr=False)


@dataclass(frozen=True)
class AnalysisReport:
    """Per-intersection results, isolated failures, and provenance."""

    results: tuple[IntersectionResult, ...]
    diagnostics: tuple[SeriesDiagnostic, ...]
    provenance: dict

    def gev_summary(self) -> dict:
        """Corridor-level view of how the GEV family fared per intersection.

        ``per_intersection`` maps label to the GEV rank, RSS and fitted
        shape (None where the GEV fit failed); the scalar counters say in
        how many intersections GEV ranked first or in the top three.
        """
        per: dict[str, dict] = {}
        top1 = top3 = 0
        for res in self.results:
            rank = res.ranking.rank_of(GEV)
            fit = res.ranking.fits.get(GEV)
            per[res.label] = {
                "rank": rank,
                "rss": None if rank is None else next(
                    e.rss for e in res.ranking.entries if e.family == GEV),
                "shape": None if fit is None else fit.params[2],
            }
            if rank is not None:
                top1 += rank == 1
                top3 += rank <= 3
        return {
            "per_intersection": per,
            "intersections": len(self.results),
            "gev_rank1_count": top1,
            "gev_top3_count": top3,
        }


def _parse_timestamp(text: str, row: int) -> dt.datetime:
    try:
        return dt.datetime.fromisoformat(text)
    except ValueError:
        raise SchemaError(
            f"row {row}, column 'timestamp': {text!r} is not ISO-8601"
        ) from None


def ingest_csv(source, policy: CleaningPolicy | None = None,
               units: str = "feet") -> CorridorDataset:
    """Parse and validate a corridor CSV into per-intersection series.

    ``source`` is a path or an open text stream.  The header must be
    byte-identical to ``timestamp,intersection,queue_length``; rows carry
    ISO-8601 timestamps, an intersection label, and a real queue length.
    Sampling must be uniform per intersection; exact-multiple timestamp
    jumps are treated as gaps under the cleaning policy, anything else is
    a schema error.  Error messages name the offending 1-based file row.
    """
    policy = policy or CleaningPolicy()
    if hasattr(source, "read"):
        text = source.read()
        origin = getattr(source, "name", "<stream>")
    else:
        with open(source, "r", newline="") as handle:
            text = handle.read()
        origin = str(source)

    lines = text.splitlines()
    if not lines:
        raise SchemaError(f"{origin}: empty input")
    if lines[0] != CSV_HEADER:
        raise SchemaError(
            f"{origin}: row 1: header must be exactly {CSV_HEADER!r}, "
            f"got {lines[0]!r}"
        )

    diagnostics: list[str] = []
    bad_rows = 0
    # label -> list of (timestamp, value, file row)
    rows: dict[str, list[tuple[dt.datetime, float, int]]] = {}
    seen: set[tuple[str, dt.datetime]] = set()
    reader = csv.reader(io.StringIO("\n".join(lines[1:])))
    for offset, parts in enumerate(reader):
        rownum = offset + 2
        if not parts:
            continue
        try:
            if len(parts) != 3:
                raise SchemaError(
                    f"row {rownum}: expected 3 columns, got {len(parts)}"
                )
            when = _parse_timestamp(parts[0], rownum)
            label = parts[1]
            if not label:
                raise SchemaError(f"row {rownum}, column 'intersection': empty label")
            try:
                value = float(parts[2])
            except ValueError:
                raise SchemaError(
                    f"row {rownum}, column 'queue_length': {parts[2]!r} "
                    "is not a number"
                ) from None
            if not np.isfinite(value):
                raise SchemaError(
                    f"row {rownum}, column 'queue_length': non-finite value"
                )
        except SchemaError as exc:
            bad_rows += 1
            if bad_rows > policy.bad_row_tolerance:
                raise SchemaError(f"{origin}: {exc}") from None
            diagnostics.append(f"dropped unparseable {exc}")
            continue

        if value < 0:
            if policy.negative == "reject":
                raise SchemaError(
                    f"{origin}: row {rownum}, column 'queue_length': "
                    f"negative value {value!r}"
                )
            diagnostics.append(
                f"{label}: clamped negative value {value!r} at row {rownum}"
            )
            value = 0.0

        key = (label, when)
        if key in seen:
            raise SchemaError(
                f"{origin}: row {rownum}: duplicate (timestamp, intersection) "
                f"pair ({parts[0]}, {label})"
            )
        seen.add(key)
        rows.setdefault(label, []).append((when, value, rownum))

    if not rows:
        raise SchemaError(f"{origin}: no data rows")

    series: list[TimeSeries] = []
    metadata: dict[str, dict] = {}
    for label in sorted(rows):
        try:
            # Sorting mixed aware/naive timestamps raises TypeError too.
            entries = sorted(rows[label], key=lambda e: e[0])
            if len(entries) < 2:
                raise SchemaError(
                    f"{origin}: intersection {label!r} has fewer than 2 samples"
                )
            steps = [
                (b[0] - a[0]).total_seconds()
                for a, b in zip(entries, entries[1:])
            ]
        except TypeError:
            raise SchemaError(
                f"{origin}: intersection {label!r} mixes timezone-aware and "
                "naive timestamps"
            ) from None
        interval = min(steps)
        values: list[float] = [entries[0][1]]
        for (prev, cur, step) in zip(entries, entries[1:], steps):
            multiple = step / interval
            if abs(multiple - round(multiple)) > _STEP_TOL:
                raise SchemaError(
                    f"{origin}: row {cur[2]}: non-uniform timestamps for "
                    f"intersection {label!r} (step {step:g} s is not a "
                    f"multiple of {interval:g} s)"
                )
            missing = int(round(multiple)) - 1
            if missing > 0:
                if policy.gaps == "reject" or missing > policy.gap_limit:
                    raise SchemaError(
                        f"{origin}: row {cur[2]}: gap of {missing} missing "
                        f"sample(s) before this row for intersection {label!r}"
                    )
                values.extend([prev[1]] * missing)
                diagnostics.append(
                    f"{label}: forward-filled {missing} missing sample(s) "
                    f"before row {cur[2]}"
                )
            values.append(cur[1])

        arr = np.asarray(values, dtype=float)
        run_start = 0
        for i in range(1, len(arr) + 1):
            if i == len(arr) or arr[i] != arr[run_start]:
                run = i - run_start
                if run > policy.stuck_threshold:
                    diagnostics.append(
                        f"{label}: value {arr[run_start]!r} stuck for {run} "
                        f"samples starting at sample {run_start}"
                    )
                run_start = i
        series.append(TimeSeries(
            start_time=entries[0][0],
            interval=float(interval),
            values=arr,
            label=label,
        ))
        metadata[label] = {"direction": "", "units": units}

    return CorridorDataset(
        series=tuple(series),
        metadata=metadata,
        diagnostics=tuple(diagnostics),
    )


def _series_checksum(series: TimeSeries) -> str:
    digest = hashlib.sha256()
    digest.update(series.label.encode())
    digest.update(series.start_time.isoformat().encode())
    digest.update(repr(float(series.interval)).encode())
    digest.update(np.ascontiguousarray(series.values, dtype=float).tobytes())
    return digest.hexdigest()


def _config_echo(config: PipelineConfig) -> dict:
    echo = asdict(config)
    echo["active_window"] = list(config.active_window)
    echo["catalog"] = list(config.catalog)
    echo["gof_families"] = list(config.gof_families)
    return echo


def _decomposition_summary(series: TimeSeries, filtered: TimeSeries,
                           dec: DecompositionResult, resid: TimeSeries,
                           n_maxima: int) -> dict:
    return {
        "period": dec.period,
        "samples_raw": len(series),
        "samples_active": len(filtered),
        "samples_residual": len(resid),
        "block_maxima": n_maxima,
        "seasonal_amplitude": float(np.ptp(dec.seasonal.values)),
        "trend_min": float(np.nanmin(dec.trend.values)),
        "trend_max": float(np.nanmax(dec.trend.values)),
        "residual_std": float(np.std(resid.values)),
    }


def run_pipeline(dataset: CorridorDataset,
                 config: PipelineConfig | None = None) -> AnalysisReport:
    """Run the full analysis chain on every intersection.

    Per series: active-hours filter, seasonal decomposition, residual
    extraction, block maxima, RSS ranking over the catalog, then
    goodness-of-fit reports for the configured families (default: the
    best-ranked family plus gumbel).  A failure in one series is recorded
    as a diagnostic and leaves every other series' results untouched.
    """
    config = config or PipelineConfig()
    if not dataset.series:
        raise EmptySeriesError("empty dataset: nothing to analyze")

    results: list[IntersectionResult] = []
    diagnostics: list[SeriesDiagnostic] = []
    for series in sorted(dataset.series, key=lambda s: s.label):
        stage = "filter"
        try:
            filtered = active_hours_filter(series, *config.active_window)
            stage = "decompose"
            dec = decompose(filtered, config.seasonal_period)
            resid = residual_series(dec)
            stage = "block_maxima"
            maxima = extract_block_maxima(resid, config.block_size)
            stage = "ranking"
            hist = make_histogram(maxima.maxima, config.binning)
            table = rank_candidates(
                maxima.maxima, catalog=config.catalog,
                label=series.label, histogram=hist,
            )
            stage = "gof"
            wanted = config.gof_families
            if not wanted:
                wanted = (table.best().family,)
                if GUMBEL not in wanted:
                    wanted = wanted + (GUMBEL,)
            gof_reports = []
            gof_fits: dict = {}
            pp_sets: dict[str, np.ndarray] = {}
            qq_sets: dict[str, np.ndarray] = {}
            for tag in wanted:
                fitted = table.fits.get(tag)
                if fitted is None:
                    fitted = fit_mle(maxima.maxima, tag, binning=config.binning,
                                     histogram=hist)
                if isinstance(fitted, FitFailure):
                    diagnostics.append(SeriesDiagnostic(
                        label=series.label, stage="gof",
                        message=f"{tag}: {fitted.reason}",
                    ))
                    continue
                report = gof_report(maxima.maxima, fitted)
                gof_reports.append(report)
                gof_fits[tag] = fitted
                pp_sets[tag] = report.pp_points
                qq_sets[tag] = report.qq_points
        except Exception as exc:  # noqa: BLE001 - isolation is the contract
            diagnostics.append(SeriesDiagnostic(
                label=series.label, stage=stage, message=str(exc),
            ))
            continue
        results.append(IntersectionResult(
            label=series.label,
            decomposition=_decomposition_summary(
                series, filtered, dec, resid, len(maxima)),
            ranking=table,
            gof_reports=tuple(gof_reports),
            histogram=hist,
            gof_fits=gof_fits,
            pp_sets=pp_sets,
            qq_sets=qq_sets,
        ))

    from . import __version__

    provenance = {
        "tool": "qextremes",
        "version": __version__,
        "config": _config_echo(config),
        "input_checksums": {
            s.label: _series_checksum(s) for s in dataset.series
        },
        "ingest_diagnostics": list(dataset.diagnostics),
        "created_at": dt.datetime.now().isoformat(),
    }
    return AnalysisReport(
        results=tuple(results),
        diagnostics=tuple(diagnostics),
        provenance=provenance,
    )


def format_ranking_cell(family: str, rss: float) -> str:
    """Render one ranking cell as ``family (rss)`` with six decimals."""
    return f"{family} ({rss:.6f})"


def _safe_label(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", label) or "series"


def _write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _svg_document(width: int, height: int, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


def _svg_plot(points: np.ndarray, title: str,
              bars: Histogram | None = None) -> str:
    """Minimal self-contained SVG: optional histogram bars plus a polyline."""
    title = xml_escape(title)  # labels may hold &, < and friends
    width, height, pad = 480, 360, 45.0
    xs = points[:, 0]
    ys = points[:, 1]
    x_lo, x_hi = float(np.min(xs)), float(np.max(xs))
    y_lo, y_hi = float(np.min(ys)), float(np.max(ys))
    if bars is not None:
        x_lo = min(x_lo, float(bars.bin_edges[0]))
        x_hi = max(x_hi, float(bars.bin_edges[-1]))
        y_lo = min(y_lo, 0.0)
        y_hi = max(y_hi, float(np.max(bars.densities)))
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0

    def sx(v: float) -> float:
        return pad + (v - x_lo) / x_span * (width - 2 * pad)

    def sy(v: float) -> float:
        return height - pad - (v - y_lo) / y_span * (height - 2 * pad)

    body = [
        f'<title>{title}</title>',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" '
        f'font-family="monospace" font-size="13">{title}</text>',
    ]
    if bars is not None:
        for left, right, density in zip(
                bars.bin_edges[:-1], bars.bin_edges[1:], bars.densities):
            x0, x1 = sx(float(left)), sx(float(right))
            y1 = sy(float(density))
            body.append(
                f'<rect x="{x0:.2f}" y="{y1:.2f}" width="{x1 - x0:.2f}" '
                f'height="{height - pad - y1:.2f}" fill="#cfd8e3" '
                'stroke="#8fa0b3" stroke-width="0.5"/>'
            )
    coords = " ".join(f"{sx(float(x)):.2f},{sy(float(y)):.2f}"
                      for x, y in points)
    body.append(
        f'<polyline points="{coords}" fill="none" stroke="#1f4e79" '
        'stroke-width="1.5"/>'
    )
    body.append(
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" '
        f'height="{height - 2 * pad}" fill="none" stroke="#444" '
        'stroke-width="1"/>'
    )
    return _svg_document(width, height, body)


def _gof_json(report: GofReport) -> dict:
    return {
        "family": report.family,
        "pp_r2": report.pp_r2,
        "qq_r2": report.qq_r2,
        "pp_diagonal_r2": report.pp_diagonal_r2,
        "ks_statistic": report.ks_statistic,
        "ks_p_value": report.ks_p_value,
        "ks_caveat": report.ks_caveat,
    }


def emit_report(report: AnalysisReport, out_dir,
                formats: tuple[str, ...] = ("csv", "txt", "json")) -> tuple[str, ...]:
    """Write report files and return the manifest of paths.

    csv: per-label ranking, histogram-with-fitted-pdf and P-P/Q-Q point
    files; txt: human-readable ranking in ``family (rss)`` cells; json:
    the full report with stable key order; svg: self-contained plot
    renderings.  Emission is deterministic: re-emitting the same report
    object rewrites byte-identical files.
    """
    import os

    unknown = set(formats) - {"csv", "txt", "json", "svg"}
    if unknown:
        raise ParameterDomainError(f"unknown report formats: {sorted(unknown)}")
    os.makedirs(out_dir, exist_ok=True)
    manifest: list[str] = []
    json_intersections: dict[str, dict] = {}

    for result in report.results:
        label = result.label
        safe = _safe_label(label)
        plot_files: list[str] = []

        if "csv" in formats:
            path = os.path.join(out_dir, f"{safe}_ranking.csv")
            rows = [
                [entry.rank, entry.family, repr(entry.rss), "ok"]
                for entry in result.ranking.entries
            ]
            rows += [
                ["", failure.family, "", failure.reason]
                for failure in result.ranking.failures
            ]
            _write_csv(path, ["rank", "family", "rss", "status"], rows)
            manifest.append(path)
            plot_files.append(f"{safe}_ranking.csv")

            path = os.path.join(out_dir, f"{safe}_histogram.csv")
            centers = result.histogram.centers
            gof_tags = [rep.family for rep in result.gof_reports]
            header = ["bin_left", "bin_right", "empirical_density"]
            header += [f"pdf_{tag}" for tag in gof_tags]
            curves = [result.gof_fits[tag].pdf(centers) for tag in gof_tags]
            rows = []
            for i, (left, right) in enumerate(zip(
                    result.histogram.bin_edges[:-1],
                    result.histogram.bin_edges[1:])):
                row = [repr(float(left)), repr(float(right)),
                       repr(float(result.histogram.densities[i]))]
                row += [repr(float(curve[i])) for curve in curves]
                rows.append(row)
            _write_csv(path, header, rows)
            manifest.append(path)
            plot_files.append(f"{safe}_histogram.csv")

            for tag in sorted(result.pp_sets):
                path = os.path.join(out_dir, f"{safe}_pp_{tag}.csv")
                _write_csv(
                    path,
                    ["empirical_probability", "theoretical_probability"],
                    ([repr(float(x)), repr(float(y))]
                     for x, y in result.pp_sets[tag]),
                )
                manifest.append(path)
                plot_files.append(f"{safe}_pp_{tag}.csv")
            for tag in sorted(result.qq_sets):
                path = os.path.join(out_dir, f"{safe}_qq_{tag}.csv")
                _write_csv(
                    path,
                    ["theoretical_quantile", "empirical_quantile"],
                    ([repr(float(x)), repr(float(y))]
                     for x, y in result.qq_sets[tag]),
                )
                manifest.append(path)
                plot_files.append(f"{safe}_qq_{tag}.csv")

        if "txt" in formats:
            path = os.path.join(out_dir, f"{safe}_ranking.txt")
            lines = [f"intersection: {label}"]
            lines += [
                f"{entry.rank:>3}  {format_ranking_cell(entry.family, entry.rss)}"
                for entry in result.ranking.entries
            ]
            lines += [
                f"  -  {failure.family}: fit failed ({failure.reason})"
                for failure in result.ranking.failures
            ]
            with open(path, "w") as handle:
                handle.write("\n".join(lines) + "\n")
            manifest.append(path)

        if "svg" in formats:
            best_tag = result.ranking.best().family
            if best_tag in result.ranking.fits:
                path = os.path.join(out_dir, f"{safe}_fit.svg")
                centers = result.histogram.centers
                curve = result.ranking.fits[best_tag].pdf(centers)
                points = np.column_stack([centers, curve])
                with open(path, "w") as handle:
                    handle.write(_svg_plot(
                        points,
                        f"{label}: {format_ranking_cell(best_tag, result.ranking.best().rss)}",
                        bars=result.histogram,
                    ))
                manifest.append(path)
                plot_files.append(f"{safe}_fit.svg")
            for kind, sets in (("pp", result.pp_sets), ("qq", result.qq_sets)):
                for tag in sorted(sets):
                    path = os.path.join(out_dir, f"{safe}_{kind}_{tag}.svg")
                    with open(path, "w") as handle:
                        handle.write(_svg_plot(
                            sets[tag], f"{label}: {kind.upper()} {tag}"))
                    manifest.append(path)
                    plot_files.append(f"{safe}_{kind}_{tag}.svg")

        json_intersections[label] = {
            "decomposition": result.decomposition,
            "ranking": [
                {"rank": e.rank, "family": e.family, "rss": e.rss}
                for e in result.ranking.entries
            ],
            "fit_failures": [
                {"family": f.family, "reason": f.reason}
                for f in result.ranking.failures
            ],
            "fitted_params": {
                tag: list(fit.params)
                for tag, fit in sorted(
                    {**result.ranking.fits, **result.gof_fits}.items())
            },
            "gof": [_gof_json(rep) for rep in result.gof_reports],
            "plot_files": plot_files,
        }

    if "json" in formats:
        path = os.path.join(out_dir, "report.json")
        payload = {
            "provenance": report.provenance,
            "intersections": json_intersections,
            "gev_summary": report.gev_summary(),
            "diagnostics": [
                {"label": d.label, "stage": d.stage, "message": d.message}
                for d in report.diagnostics
            ],
        }
        with open(path, "w") as handle:
            json.dump(payload, handle, sort_keys=True, indent=2)
            handle.write("\n")
        manifest.append(path)

    for path in manifest:
        if not os.path.isfile(path):
            raise SchemaError(f"emission failed to produce {path}")
        if path.endswith(".csv"):
            with open(path, "r") as handle:
                first = handle.readline()
            if "," not in first:
                raise SchemaError(f"{path}: emitted without a column header")

    return tuple(sorted(manifest))
