"""Command line interface.

Subcommands: parse, segment, features, aggregate, compare, synth, render.
Data goes to stdout (or --out PATH); diagnostics go to stderr. Exit codes:
0 success, 1 usage error, 2 parse/format error, 3 empty-cohort or
degenerate-data error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .errors import (
    DegenerateDataError,
    EmptyCohortError,
    EmptyInputError,
    InsufficientDataError,
    ManifestError,
    ParseError,
    PenAirError,
    SynthSpecError,
)
from .features import Feature, aggregate_cohort, feature_vector
from .ingest import (
    ParseOptions,
    SampleStream,
    read_manifest,
    read_session,
    validate_stream,
)
from .report import (
    RunConfig,
    TableFormat,
    format_table,
    render_p_table,
    render_time_table,
    render_trajectories,
)
from .segmentation import segment
from .stats import compare_cohorts
from .synth import generate_corpus, read_corpus_spec

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FORMAT = 2
EXIT_DEGENERATE = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the CLI contract wants 1
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gap-factor", type=float, default=3.0, metavar="F",
                        help="gap threshold multiple of the modal period (default 3)")
    common.add_argument("--min-gap-ticks", type=int, default=None, metavar="N",
                        help="absolute floor for the gap threshold (default period+1)")
    common.add_argument("--anomaly-threshold", type=_fraction, default=Fraction(7, 10),
                        metavar="R", help="in-air-long share marking a file anomalous (default 0.7)")
    common.add_argument("--exact-limit", type=int, default=20, metavar="N",
                        help="largest pooled size for the exact test (default 20)")
    common.add_argument("--format", choices=[TableFormat.CSV, TableFormat.MARKDOWN],
                        default=TableFormat.CSV, dest="table_format",
                        help="table output format (default csv)")
    common.add_argument("--out", default=None, metavar="PATH",
                        help="write output here instead of stdout")
    common.add_argument("--derive-status-from-pressure", action="store_true",
                        help="ignore the status column; on-surface means pressure > 0")

    parser = _Parser(prog="penair", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse one recording and report summary statistics")
    p.add_argument("file")
    p.set_defaults(handler=_cmd_parse)

    p = sub.add_parser("segment", parents=[common], help="list the strokes of one recording")
    p.add_argument("file")
    p.set_defaults(handler=_cmd_segment)

    p = sub.add_parser("features", parents=[common], help="per-file feature vectors for a corpus manifest")
    p.add_argument("manifest")
    p.set_defaults(handler=_cmd_features)

    p = sub.add_parser("aggregate", parents=[common], help="cohort mean-time table for a corpus manifest")
    p.add_argument("manifest")
    p.set_defaults(handler=_cmd_aggregate)

    p = sub.add_parser("compare", parents=[common], help="rank tests between two cohorts, per task and feature")
    p.add_argument("manifest")
    p.add_argument("--cohort-a", required=True, metavar="NAME")
    p.add_argument("--cohort-b", required=True, metavar="NAME")
    p.add_argument("--database", default=None, metavar="NAME",
                   help="restrict the comparison to one database label")
    p.set_defaults(handler=_cmd_compare)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic corpus with a manifest")
    p.add_argument("--spec", required=True, metavar="FILE", help="corpus description (INI format)")
    p.add_argument("--seed", required=True, type=int, metavar="N")
    p.set_defaults(handler=_cmd_synth)

    p = sub.add_parser("render", parents=[common], help="render one recording's trajectories to SVG")
    p.add_argument("file")
    p.set_defaults(handler=_cmd_render)

    return parser


def _run_config(args) -> RunConfig:
    return RunConfig(
        gap_factor=args.gap_factor,
        min_gap_ticks=args.min_gap_ticks,
        anomaly_threshold=args.anomaly_threshold,
        exact_limit=args.exact_limit,
        table_format=args.table_format,
    )


def _parse_options(args) -> ParseOptions:
    return ParseOptions(derive_status_from_pressure=args.derive_status_from_pressure)


def _print_warnings(stream: SampleStream, shown_path: str) -> None:
    for w in stream.warnings:
        sys.stderr.write(f"WARN {shown_path}:{w.line} {w.message}\n")


def _emit(text: str, args) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _table(header, rows, cfg: RunConfig) -> str:
    return format_table(header, rows, cfg.table_format)


def _cmd_parse(args, cfg: RunConfig) -> int:
    stream = read_session(args.file, _parse_options(args))
    _print_warnings(stream, args.file)
    report = validate_stream(stream)
    header = ("source", "n_samples", "t_first", "t_last", "span",
              "status_transitions", "pressure_min", "pressure_max", "warnings")
    row = (args.file, str(report.n_samples), str(report.t_first), str(report.t_last),
           str(report.span), str(report.n_status_transitions), str(report.pressure_min),
           str(report.pressure_max), str(report.n_warnings))
    _emit(_table(header, [row], cfg), args)
    return EXIT_OK


def _cmd_segment(args, cfg: RunConfig) -> int:
    stream = read_session(args.file, _parse_options(args))
    _print_warnings(stream, args.file)
    seg = segment(stream, cfg.segmentation_config())
    header = ("class", "start_t", "end_t", "duration", "n_samples")
    rows = [
        (s.cls.value, str(s.start_t), str(s.end_t), str(s.duration), str(s.n_samples))
        for s in seg.strokes
    ]
    _emit(_table(header, rows, cfg), args)
    return EXIT_OK


def _collect_vectors(manifest_path: str, args, cfg: RunConfig):
    manifest = read_manifest(manifest_path)
    seg_cfg = cfg.segmentation_config()
    policy = cfg.anomaly_policy()
    opts = _parse_options(args)
    vectors = []
    for record in manifest:
        stream = read_session(record.path, opts)
        _print_warnings(stream, str(record.path))
        vectors.append(feature_vector(segment(stream, seg_cfg), policy, record))
    return vectors


def _cmd_features(args, cfg: RunConfig) -> int:
    vectors = _collect_vectors(args.manifest, args, cfg)
    header = ("path", "database", "task", "subject", "cohort") + tuple(
        f.value for f in Feature
    ) + ("anomalous",)
    rows = []
    for v in vectors:
        rec = v.source
        rows.append(
            (str(rec.path), rec.database, rec.task, rec.subject, rec.cohort)
            + tuple(str(v.value(f)) for f in Feature)
            + ("true" if v.anomalous else "false",)
        )
    _emit(_table(header, rows, cfg), args)
    return EXIT_OK


def _cmd_aggregate(args, cfg: RunConfig) -> int:
    vectors = _collect_vectors(args.manifest, args, cfg)
    if not vectors:
        raise EmptyCohortError("manifest lists no files")
    groups: dict[tuple[str, str, str], list] = {}
    for v in vectors:
        rec = v.source
        groups.setdefault((rec.database, rec.cohort, rec.task), []).append(v)
    summaries = [aggregate_cohort(groups[key]) for key in sorted(groups)]
    _emit(render_time_table(summaries, cfg.table_format), args)
    return EXIT_OK


def _cmd_compare(args, cfg: RunConfig) -> int:
    vectors = _collect_vectors(args.manifest, args, cfg)
    if args.database is not None:
        vectors = [v for v in vectors if v.source.database == args.database]
    side_a = [v for v in vectors if v.source.cohort == args.cohort_a]
    side_b = [v for v in vectors if v.source.cohort == args.cohort_b]
    if not side_a or not side_b:
        raise EmptyCohortError(
            f"no files for cohort {args.cohort_a!r}" if not side_a
            else f"no files for cohort {args.cohort_b!r}"
        )
    tasks = sorted({v.source.task for v in side_a} | {v.source.task for v in side_b})
    results = [
        compare_cohorts(side_a, side_b, task, feature, cfg.exact_limit)
        for task in tasks
        for feature in Feature
    ]
    if cfg.table_format == TableFormat.MARKDOWN:
        _emit(render_p_table(results, TableFormat.MARKDOWN), args)
        return EXIT_OK
    header = ("task", "feature", "n_A", "n_B", "U_A", "p", "method", "significant")
    rows = [
        (
            r.task,
            r.feature.value,
            str(r.u.n_a),
            str(r.u.n_b),
            _number(r.u.u_a),
            repr(float(r.p)),
            r.method,
            "true" if r.significant else "false",
        )
        for r in results
    ]
    _emit(_table(header, rows, cfg), args)
    return EXIT_OK


def _number(x: float) -> str:
    return str(int(x)) if x == int(x) else repr(x)


def _cmd_synth(args, cfg: RunConfig) -> int:
    if not args.out:
        sys.stderr.write("error: synth requires --out DIR\n")
        return EXIT_USAGE
    spec = read_corpus_spec(args.spec)
    manifest = generate_corpus(spec, args.out, args.seed)
    sys.stdout.write(f"{manifest}\n")
    return EXIT_OK


def _cmd_render(args, cfg: RunConfig) -> int:
    stream = read_session(args.file, _parse_options(args))
    _print_warnings(stream, args.file)
    seg = segment(stream, cfg.segmentation_config())
    _emit(render_trajectories(stream, seg), args)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # raised by --help (0) and usage errors (1)
        return int(exc.code or 0)
    try:
        cfg = _run_config(args)
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    try:
        return args.handler(args, cfg)
    except (ParseError, ManifestError, EmptyInputError, SynthSpecError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FORMAT
    except (EmptyCohortError, DegenerateDataError, InsufficientDataError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DEGENERATE
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FORMAT
    except PenAirError as exc:  # anything else from the library is a data problem
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
