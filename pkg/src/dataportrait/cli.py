"""Operator entry point: build, inspect, query, batch-report, and serve.

Exit codes: 0 success (for `check`: document is a member), 1 I/O or format
failure, 2 invalid flags, 3 (`check` only) document is not a member.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
import time
from pathlib import Path

from .ingest import (
    DocumentSource,
    SourceIOError,
    build_portrait,
    estimate_elements,
    iter_documents,
)
from .query import (
    check_document,
    classify_membership,
    expected_overlap,
    format_report,
    payload_json,
    report_payload,
)
from .sketch import (
    FORMAT_VERSION,
    PortraitFormatError,
    load_portrait,
    plan_parameters,
    save_portrait,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_NOT_MEMBER = 3


def _expected_elements(value: str) -> str:
    if value == "auto":
        return value
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a positive integer or 'auto', got {value!r}"
        )
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected-elements must be >= 1, got {n}")
    return value


def _positive_int(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _fpr(value: str) -> float:
    p = float(value)
    if not 0.0 < p < 1.0:
        raise argparse.ArgumentTypeError(f"fpr must be in (0, 1), got {p}")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dataportrait",
        description="Strided Bloom filter sketches for corpus membership testing.",
    )
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    parser.add_argument(
        "--threads", type=_positive_int, default=1, help="worker threads for build"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    build = commands.add_parser("build", help="ingest a corpus into a portrait file")
    build.add_argument("--input", nargs="+", required=True, help="corpus files ('-' = stdin)")
    build.add_argument("--format", choices=("jsonl", "text", "lines"), default="jsonl")
    build.add_argument("--field", default="text", help="JSONL text field name")
    build.add_argument("--width", type=_positive_int, default=50)
    build.add_argument("--stride", type=_positive_int, default=None)
    build.add_argument("--fpr", type=_fpr, default=1e-3)
    build.add_argument(
        "--expected-elements",
        type=_expected_elements,
        default="auto",
        help="tile count to size the filter for, or 'auto' to pre-scan",
    )
    build.add_argument("--shards", type=_positive_int, default=1)
    build.add_argument("--out", required=True)

    check = commands.add_parser("check", help="query one document")
    check.add_argument("--portrait", required=True)
    check.add_argument("--file", default=None, help="document path (default: stdin)")
    check.add_argument("--json", action="store_true", help="machine-readable report")

    report = commands.add_parser("report", help="expected-overlap summary for a dataset")
    report.add_argument("--portrait", required=True)
    report.add_argument("--dataset", required=True)
    report.add_argument("--format", choices=("jsonl", "lines"), default="jsonl")
    report.add_argument("--field", default="text")

    stats = commands.add_parser("stats", help="print portrait header and health")
    stats.add_argument("--portrait", required=True)

    serve = commands.add_parser("serve", help="serve portraits over HTTP")
    serve.add_argument("--portrait", nargs="+", required=True)
    serve.add_argument(
        "--addr",
        default=os.environ.get("DP_ADDR", "127.0.0.1:8000"),
        help="HOST:PORT to bind (env DP_ADDR)",
    )
    return parser


def _fail(message: str) -> int:
    print(f"dataportrait: {message}", file=sys.stderr)
    return EXIT_IO


def _make_source(fmt: str, paths: list[str], field: str) -> DocumentSource:
    return DocumentSource(kind=fmt, paths=tuple(paths), field_name=field)


def cmd_build(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    stride = args.stride if args.stride is not None else args.width
    if stride > args.width:
        parser.error(f"--stride must be <= --width ({stride} > {args.width})")
    source = _make_source(args.format, args.input, args.field)
    try:
        if args.expected_elements == "auto":
            if "-" in args.input:
                parser.error("--expected-elements auto cannot re-read stdin; pass a count")
            expected = max(
                1,
                estimate_elements(
                    source, 1.0, ngram_width=args.width, stride=stride
                ),
            )
        else:
            expected = int(args.expected_elements)
        params = plan_parameters(
            expected, args.fpr, ngram_width=args.width, stride=stride
        )
        filt, rep = build_portrait(
            source, params, shards=args.shards, threads=args.threads
        )
        save_portrait(filt, args.out)
    except (SourceIOError, OSError) as exc:
        return _fail(str(exc))
    if not args.quiet:
        bits_per_element = params.m_bits / max(1, rep.tiles_hashed)
        print(f"wrote {args.out}")
        print(
            f"documents={rep.documents} tiles={rep.tiles_hashed} "
            f"chars={rep.chars_in} malformed={rep.malformed_records}"
        )
        print(
            f"elapsed={rep.elapsed:.2f}s saturation={rep.final_saturation:.4f} "
            f"bits/element={bits_per_element:.2f}"
        )
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    try:
        filt = load_portrait(args.portrait)
    except (PortraitFormatError, OSError) as exc:
        return _fail(f"{args.portrait}: {exc}")
    try:
        if args.file is None:
            document = sys.stdin.read()
        else:
            with open(args.file, "r", encoding="utf-8", errors="replace") as handle:
                document = handle.read()
    except OSError as exc:
        return _fail(str(exc))
    name = Path(args.portrait).stem
    started = time.perf_counter()
    report = check_document(filt, document)
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    if args.json:
        payload = report_payload(
            report,
            portrait_name=name,
            ngram_width=filt.params.ngram_width,
            include_flags=False,
            elapsed_ms=round(elapsed_ms, 3),
        )
        print(payload_json(payload))
    else:
        print(format_report(report, portrait_name=name))
    return EXIT_OK if classify_membership(report) else EXIT_NOT_MEMBER


def cmd_report(args: argparse.Namespace) -> int:
    try:
        filt = load_portrait(args.portrait)
    except (PortraitFormatError, OSError) as exc:
        return _fail(f"{args.portrait}: {exc}")
    source = _make_source(args.format, [args.dataset], args.field)
    started = time.perf_counter()
    reports = (
        check_document(filt, doc) for doc in iter_documents(source)
    )
    try:
        summary = expected_overlap(reports, dataset_name=Path(args.dataset).stem)
    except ValueError:
        return _fail(f"{args.dataset}: no documents")
    except (SourceIOError, OSError) as exc:
        return _fail(str(exc))
    summary = dataclasses.replace(
        summary, total_query_seconds=time.perf_counter() - started
    )
    note = (
        "  (above alignment-averaged expectation)"
        if summary.expected_overlap_pct > 100.0
        else ""
    )
    print(f"{'dataset':<24} {'E.O.%':>8} {'instances':>10} {'seconds':>8}")
    print(
        f"{summary.dataset_name:<24} {summary.expected_overlap_pct:>8.2f} "
        f"{summary.instances:>10} {summary.total_query_seconds:>8.2f}{note}"
    )
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    try:
        filt = load_portrait(args.portrait)
        file_size = os.path.getsize(args.portrait)
    except (PortraitFormatError, OSError) as exc:
        return _fail(f"{args.portrait}: {exc}")
    p = filt.params
    print(f"portrait:       {args.portrait}")
    print(f"format version: {FORMAT_VERSION}")
    print(f"seed:           {p.seed}")
    print(f"ngram width:    {p.ngram_width}")
    print(f"stride:         {p.stride}")
    print(f"k hashes:       {p.k_hashes}")
    print(f"m bits:         {p.m_bits}")
    print(f"inserted:       {filt.inserted}")
    print(f"saturation:     {filt.saturation():.6f}")
    print(f"estimated fpr:  {filt.estimated_fpr():.3e}")
    print(f"file size:      {file_size} bytes")
    print(f"bits/element:   {p.m_bits / max(1, filt.inserted):.2f}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    import uvicorn

    from .service import create_app, mark_ready

    host, _, port_text = args.addr.rpartition(":")
    if not host or not port_text.isdigit():
        parser.error(f"--addr must be HOST:PORT, got {args.addr!r}")
    portraits = {}
    for path in args.portrait:
        name = Path(path).stem
        if name in portraits:
            return _fail(f"duplicate portrait name {name!r} (from {path})")
        try:
            portraits[name] = load_portrait(path)
        except (PortraitFormatError, OSError) as exc:
            return _fail(f"{path}: {exc}")
    app = create_app(portraits)
    try:
        mark_ready(app)
    except RuntimeError as exc:
        return _fail(str(exc))
    if not args.quiet:
        names = ", ".join(sorted(portraits))
        print(f"serving {names} on http://{host}:{port_text}")
    uvicorn.run(
        app,
        host=host,
        port=int(port_text),
        log_level="warning" if args.quiet else "info",
    )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "build":
        return cmd_build(args, parser)
    if args.command == "check":
        return cmd_check(args)
    if args.command == "report":
        return cmd_report(args)
    if args.command == "stats":
        return cmd_stats(args)
    return cmd_serve(args, parser)


if __name__ == "__main__":
    sys.exit(main())
