"""Command-line interface: analyze, simulate, fit, and gof subcommands.

Every option can also come from a plain ``key = value`` config file passed
with ``--config``; explicit command-line flags take final precedence over
the file, which takes precedence over built-in defaults.

Exit codes: 0 success, 1 partial (some series failed), 2 invalid input,
3 internal error.
"""

from __future__ import annotations

import argparse
import sys

from .decomposition import DEFAULT_DAY_END, DEFAULT_DAY_START
from .distributions import DEFAULT_CATALOG, GUMBEL
from .errors import QExtremesError, RankingError, SchemaError
from .pipeline import (
    CleaningPolicy,
    PipelineConfig,
    emit_report,
    format_ranking_cell,
    ingest_csv,
    run_pipeline,
)

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_INVALID_INPUT = 2
EXIT_INTERNAL = 3

_INPUT_ERRORS = (
    SchemaError,
    QExtremesError,
    FileNotFoundError,
    IsADirectoryError,
    NotADirectoryError,
    PermissionError,
)


def _parse_config_file(path: str) -> dict:
    """Read a simple ``key = value`` file: one pair per line, # comments."""
    options: dict[str, str] = {}
    with open(path, "r") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SchemaError(
                    f"{path}: line {lineno}: expected 'key = value', got {raw!r}"
                )
            key, value = line.split("=", 1)
            key = key.strip().replace("-", "_")
            if not key:
                raise SchemaError(f"{path}: line {lineno}: empty key")
            options[key] = value.strip()
    return options


def _coerce(value: str, like) -> object:
    """Coerce a config-file string to the type of the built-in default."""
    if isinstance(like, bool):
        lowered = value.lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise SchemaError(f"expected a boolean, got {value!r}")
    if isinstance(like, int) and not isinstance(like, bool):
        return int(value)
    if isinstance(like, float):
        return float(value)
    return value


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Merge defaults < config file < explicit flags for one subcommand."""
    file_options: dict[str, str] = {}
    if getattr(args, "config", None):
        file_options = _parse_config_file(args.config)
    resolved = {}
    for key, default in defaults.items():
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            resolved[key] = flag_value
        elif key in file_options:
            resolved[key] = _coerce(file_options[key], default)
        else:
            resolved[key] = default
    unknown = set(file_options) - set(defaults)
    if unknown:
        print(
            "note: config file option(s) not used by this command: "
            + ", ".join(sorted(unknown)),
            file=sys.stderr,
        )
    return resolved


def _binning_value(text):
    if text is None or text == "fd":
        return text
    try:
        return int(text)
    except ValueError:
        raise SchemaError(
            f"binning must be 'fd' or a positive integer, got {text!r}"
        ) from None


def _family_list(text: str) -> tuple[str, ...]:
    return tuple(tag.strip() for tag in text.split(",") if tag.strip())


_ANALYZE_DEFAULTS = {
    "period": 450,
    "day_start": DEFAULT_DAY_START,
    "day_end": DEFAULT_DAY_END,
    "block_size": 1,
    "binning": "fd",
    "catalog": ",".join(DEFAULT_CATALOG),
    "gof_families": "",
    "negative_policy": "reject",
    "gap_policy": "reject",
    "gap_limit": 0,
    "stuck_threshold": 30,
    "bad_row_tolerance": 0,
    "units": "feet",
    "formats": "csv,txt,json",
}


def _cmd_analyze(args: argparse.Namespace) -> int:
    options = _resolve(args, _ANALYZE_DEFAULTS)
    policy = CleaningPolicy(
        negative=options["negative_policy"],
        gaps=options["gap_policy"],
        gap_limit=int(options["gap_limit"]),
        stuck_threshold=int(options["stuck_threshold"]),
        bad_row_tolerance=int(options["bad_row_tolerance"]),
    )
    config = PipelineConfig(
        seasonal_period=int(options["period"]),
        active_window=(options["day_start"], options["day_end"]),
        block_size=int(options["block_size"]),
        binning=_binning_value(options["binning"]),
        catalog=_family_list(options["catalog"]) or DEFAULT_CATALOG,
        gof_families=_family_list(options["gof_families"]),
    )
    dataset = ingest_csv(args.input, policy=policy, units=options["units"])
    report = run_pipeline(dataset, config)
    formats = tuple(_family_list(options["formats"])) or ("csv", "txt", "json")
    manifest = emit_report(report, args.out, formats=formats)

    for result in report.results:
        best = result.ranking.best()
        print(f"{result.label}: best {format_ranking_cell(best.family, best.rss)} "
              f"over {result.decomposition['block_maxima']} block maxima")
    for diag in report.diagnostics:
        print(f"{diag.label}: failed at {diag.stage}: {diag.message}",
              file=sys.stderr)
    print(f"wrote {len(manifest)} file(s) to {args.out}")
    if not report.results:
        return EXIT_INVALID_INPUT
    return EXIT_PARTIAL if report.diagnostics else EXIT_OK


_SIMULATE_DEFAULTS = {
    "rate": 0.10,
    "headway": 2.0,
    "cycle": 120.0,
    "green_fraction": 0.5,
    "horizon": 86400.0,
    "sample_interval": 120.0,
    "seed": 0,
    "allow_oversaturation": False,
    "vehicle_spacing": 0.0,
}


def _cmd_simulate(args: argparse.Namespace) -> int:
    from .simulator import SignalSimConfig, export_trace_csv, simulate

    options = _resolve(args, _SIMULATE_DEFAULTS)
    config = SignalSimConfig(
        arrival_rate=float(options["rate"]),
        service_headway=float(options["headway"]),
        cycle_length=float(options["cycle"]),
        green_fraction=float(options["green_fraction"]),
        horizon=float(options["horizon"]),
        sample_interval=float(options["sample_interval"]),
        seed=int(options["seed"]),
        allow_oversaturation=bool(options["allow_oversaturation"]),
    )
    trace = simulate(config)
    spacing = float(options["vehicle_spacing"]) or None
    export_trace_csv(trace, args.out, vehicle_spacing=spacing)
    lengths = trace.sampled_lengths.values
    print(f"wrote {len(lengths)} samples to {args.out} "
          f"(label {trace.sampled_lengths.label}, "
          f"mean queue {lengths.mean():.3f}, max {lengths.max():g}, "
          f"{len(trace.waits)} departures)")
    return EXIT_OK


_FIT_DEFAULTS = {
    "label": "",
    "family": "",
    "block_size": 1,
    "binning": "fd",
    "catalog": ",".join(DEFAULT_CATALOG),
}


def _single_series(args: argparse.Namespace, label: str):
    dataset = ingest_csv(args.input)
    labels = dataset.labels()
    if label:
        if label not in labels:
            raise SchemaError(
                f"intersection {label!r} not in input (have: {', '.join(labels)})"
            )
        series = dataset.get(label)
    elif len(labels) == 1:
        series = dataset.get(labels[0])
    else:
        raise SchemaError(
            f"input holds {len(labels)} intersections; pick one with --label "
            f"(have: {', '.join(labels)})"
        )
    return series


def _cmd_fit(args: argparse.Namespace) -> int:
    from .block_maxima import extract_block_maxima
    from .fitting import FitFailure, fit_mle, rank_candidates

    options = _resolve(args, _FIT_DEFAULTS)
    series = _single_series(args, options["label"])
    maxima = extract_block_maxima(series, int(options["block_size"]))
    binning = _binning_value(options["binning"])

    if options["family"]:
        outcome = fit_mle(maxima.maxima, options["family"], binning=binning)
        if isinstance(outcome, FitFailure):
            print(f"{outcome.family}: fit failed: {outcome.reason}",
                  file=sys.stderr)
            return EXIT_INVALID_INPUT
        params = ", ".join(f"{v:.6g}" for v in outcome.params)
        print(f"{outcome.family}: params ({params}), "
              f"log-likelihood {outcome.log_likelihood:.4f}, "
              f"rss {outcome.rss:.6f}, n {outcome.sample_count}")
        return EXIT_OK

    catalog = _family_list(options["catalog"]) or DEFAULT_CATALOG
    table = rank_candidates(maxima.maxima, catalog=catalog,
                            binning=binning, label=series.label)
    print(f"intersection: {series.label} ({len(maxima)} block maxima)")
    for entry in table.entries:
        print(f"{entry.rank:>3}  {format_ranking_cell(entry.family, entry.rss)}")
    for failure in table.failures:
        print(f"  -  {failure.family}: fit failed ({failure.reason})")
    return EXIT_PARTIAL if table.failures else EXIT_OK


_GOF_DEFAULTS = {
    "label": "",
    "family": GUMBEL,
    "block_size": 1,
    "binning": "fd",
    "r2_threshold": 0.98,
}


def _cmd_gof(args: argparse.Namespace) -> int:
    from .block_maxima import extract_block_maxima
    from .fitting import FitFailure, fit_mle
    from .gof import gof_report

    options = _resolve(args, _GOF_DEFAULTS)
    series = _single_series(args, options["label"])
    maxima = extract_block_maxima(series, int(options["block_size"]))
    outcome = fit_mle(maxima.maxima, options["family"],
                      binning=_binning_value(options["binning"]))
    if isinstance(outcome, FitFailure):
        print(f"{outcome.family}: fit failed: {outcome.reason}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    report = gof_report(maxima.maxima, outcome)
    params = ", ".join(f"{v:.6g}" for v in outcome.params)
    print(f"family {report.family} (params {params}) on {series.label}:")
    print(f"  pp_r2          {report.pp_r2:.6f}")
    print(f"  pp_diagonal_r2 {report.pp_diagonal_r2:.6f}")
    print(f"  qq_r2          {report.qq_r2:.6f}")
    print(f"  ks_statistic   {report.ks_statistic:.6f}")
    print(f"  ks_p_value     {report.ks_p_value:.6g}")
    threshold = float(options["r2_threshold"])
    verdict = "linear" if min(report.pp_r2, report.qq_r2) >= threshold else "non-linear"
    print(f"  verdict        {verdict} (pp_r2 and qq_r2 vs threshold {threshold})")
    print(f"  note: {report.ks_caveat}")
    return EXIT_OK


def _add_option(parser: argparse.ArgumentParser, name: str, default,
                help_text: str) -> None:
    flag = "--" + name.replace("_", "-")
    if isinstance(default, bool):
        parser.add_argument(flag, dest=name, action="store_true", default=None,
                            help=help_text)
    else:
        kind = type(default) if isinstance(default, (int, float)) else str
        parser.add_argument(flag, dest=name, type=kind, default=None,
                            help=f"{help_text} (default {default!r})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qextremes",
        description="Extreme value analysis of signalized-intersection "
                    "queue lengths.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser(
        "analyze", help="ingest a corridor CSV, run the pipeline, emit reports")
    analyze.add_argument("input", help="corridor CSV file")
    analyze.add_argument("--out", required=True, help="output directory")
    analyze.add_argument("--config", help="key=value config file")
    _add_option(analyze, "period", 450, "seasonal period in samples")
    _add_option(analyze, "day_start", DEFAULT_DAY_START, "active window start HH:MM")
    _add_option(analyze, "day_end", DEFAULT_DAY_END, "active window end HH:MM")
    _add_option(analyze, "block_size", 1, "samples per block for maxima")
    _add_option(analyze, "binning", "fd", "histogram rule: 'fd' or bin count")
    _add_option(analyze, "catalog", ",".join(DEFAULT_CATALOG),
                "comma-separated candidate families")
    _add_option(analyze, "gof_families", "",
                "comma-separated diagnostic families (default: best + gumbel)")
    _add_option(analyze, "negative_policy", "reject",
                "negative queue lengths: reject|clamp")
    _add_option(analyze, "gap_policy", "reject", "timestamp gaps: reject|ffill")
    _add_option(analyze, "gap_limit", 0, "max missing samples to forward-fill")
    _add_option(analyze, "stuck_threshold", 30,
                "flag runs of one repeated value longer than this")
    _add_option(analyze, "bad_row_tolerance", 0,
                "unparseable rows to drop before failing")
    _add_option(analyze, "units", "feet", "declared queue-length units")
    _add_option(analyze, "formats", "csv,txt,json",
                "comma-separated outputs: csv,txt,json,svg")
    analyze.set_defaults(func=_cmd_analyze)

    simulate = sub.add_parser(
        "simulate", help="run the signal-queue simulator and export a trace CSV")
    simulate.add_argument("--out", required=True, help="output CSV file")
    simulate.add_argument("--config", help="key=value config file")
    _add_option(simulate, "rate", 0.10, "arrival rate, vehicles/second")
    _add_option(simulate, "headway", 2.0, "service headway during green, seconds")
    _add_option(simulate, "cycle", 120.0, "cycle length, seconds")
    _add_option(simulate, "green_fraction", 0.5, "green share of the cycle")
    _add_option(simulate, "horizon", 86400.0, "simulated seconds")
    _add_option(simulate, "sample_interval", 120.0, "queue sampling interval")
    _add_option(simulate, "seed", 0, "random seed")
    _add_option(simulate, "allow_oversaturation", False,
                "permit unstable configurations")
    _add_option(simulate, "vehicle_spacing", 0.0,
                "feet per vehicle for distance-unit export (0 = vehicles)")
    simulate.set_defaults(func=_cmd_simulate)

    fit = sub.add_parser(
        "fit", help="fit candidate distributions to one series' block maxima")
    fit.add_argument("input", help="corridor CSV file")
    fit.add_argument("--config", help="key=value config file")
    _add_option(fit, "label", "", "intersection label (required if several)")
    _add_option(fit, "family", "", "fit only this family instead of ranking")
    _add_option(fit, "block_size", 1, "samples per block for maxima")
    _add_option(fit, "binning", "fd", "histogram rule: 'fd' or bin count")
    _add_option(fit, "catalog", ",".join(DEFAULT_CATALOG),
                "comma-separated candidate families")
    fit.set_defaults(func=_cmd_fit)

    gof = sub.add_parser(
        "gof", help="goodness-of-fit diagnostics for one series and family")
    gof.add_argument("input", help="corridor CSV file")
    gof.add_argument("--config", help="key=value config file")
    _add_option(gof, "label", "", "intersection label (required if several)")
    _add_option(gof, "family", GUMBEL, "family to diagnose")
    _add_option(gof, "block_size", 1, "samples per block for maxima")
    _add_option(gof, "binning", "fd", "histogram rule: 'fd' or bin count")
    _add_option(gof, "r2_threshold", 0.98, "linearity verdict threshold")
    gof.set_defaults(func=_cmd_gof)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RankingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except Exception as exc:  # noqa: BLE001 - the CLI boundary maps to exit 3
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
