"""Stream a corpus through normalization and tiled hashing into a portrait.

Sources yield one document at a time, so memory stays at the filter size plus
a bounded per-document buffer regardless of corpus size.  Documents can be
partitioned across shard filters and merged; because merging is a bitwise OR,
any shard count and any document order produce the identical bit array.
"""

from __future__ import annotations

import bz2
import gzip
import json
import lzma
import queue
import sys
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, TextIO

from .sketch import BloomFilter, FilterParams, merge
from .textnorm import normalize, normalized_length, strided_ngrams, tile_count

SOURCE_KINDS = ("jsonl", "text", "lines", "stdin")

_QUEUE_DEPTH = 64


class SourceIOError(OSError):
    """Reading the corpus failed; message names the failing document index."""


@dataclass
class DocumentSource:
    """Where documents come from and how to pull text out of them.

    kind "jsonl": one JSON object per line, text under ``field_name``.
    kind "text": one document per file.
    kind "lines": one document per non-empty line.
    kind "stdin": one document per non-empty line of ``stream``/sys.stdin.
    A path of "-" reads standard input in any kind.
    """

    kind: str
    paths: tuple[str, ...] = ()
    field_name: str = "text"
    stream: TextIO | None = None

    def __post_init__(self) -> None:
        if self.kind not in SOURCE_KINDS:
            raise ValueError(
                f"kind must be one of {SOURCE_KINDS}, got {self.kind!r}"
            )
        self.paths = tuple(str(p) for p in self.paths)


@dataclass
class BuildReport:
    documents: int = 0
    tiles_hashed: int = 0
    chars_in: int = 0
    elapsed: float = 0.0
    final_saturation: float = 0.0
    malformed_records: int = 0


def _open_text(path: str) -> tuple[TextIO, bool]:
    """Open possibly-compressed text by extension; returns (file, should_close)."""
    if path == "-":
        return sys.stdin, False
    suffix = Path(path).suffix.lower()
    if suffix == ".gz":
        return gzip.open(path, "rt", encoding="utf-8", errors="replace"), True
    if suffix == ".bz2":
        return bz2.open(path, "rt", encoding="utf-8", errors="replace"), True
    if suffix in (".xz", ".lzma"):
        return lzma.open(path, "rt", encoding="utf-8", errors="replace"), True
    if suffix == ".zst":
        try:
            import zstandard
        except ImportError as exc:
            raise SourceIOError(
                f"{path}: .zst input needs the optional zstandard package"
            ) from exc
        return zstandard.open(path, "rt", encoding="utf-8", errors="replace"), True
    return open(path, "r", encoding="utf-8", errors="replace"), True


def iter_documents(
    source: DocumentSource,
    on_malformed: Callable[[str, int], None] | None = None,
) -> Iterator[str]:
    """Yield documents in source order; malformed JSONL records are skipped.

    ``on_malformed(path, line_number)`` fires once per skipped record.
    """
    if source.kind == "stdin":
        stream = source.stream if source.stream is not None else sys.stdin
        for line in stream:
            line = line.rstrip("\r\n")
            if line:
                yield line
        return
    for path in source.paths:
        handle, should_close = _open_text(path)
        try:
            if source.kind == "text":
                yield handle.read()
            elif source.kind == "lines":
                for line in handle:
                    line = line.rstrip("\r\n")
                    if line:
                        yield line
            else:  # jsonl
                for line_number, line in enumerate(handle, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        record = json.loads(line)
                    except json.JSONDecodeError:
                        record = None
                    text = (
                        record.get(source.field_name)
                        if isinstance(record, dict)
                        else None
                    )
                    if isinstance(text, str):
                        yield text
                    elif on_malformed is not None:
                        on_malformed(path, line_number)
        finally:
            if should_close:
                handle.close()


def build_portrait(
    source: DocumentSource,
    params: FilterParams,
    shards: int = 1,
    threads: int = 1,
) -> tuple[BloomFilter, BuildReport]:
    """Normalize, tile, and hash every document into a filter.

    Document ``i`` goes to shard ``i % shards``; shards merge at the end, so
    the result is bit-identical for any shard count, thread count, or
    document order over the same document set.
    """
    if shards < 1:
        raise ValueError(f"shards must be >= 1, got {shards}")
    report = BuildReport()
    started = time.perf_counter()

    def count_malformed(_path: str, _line: int) -> None:
        report.malformed_records += 1

    documents = iter_documents(source, on_malformed=count_malformed)
    filters = [BloomFilter(params) for _ in range(shards)]
    try:
        if threads > 1 and shards > 1:
            report.tiles_hashed = _feed_shards_threaded(
                documents, filters, params, threads, report
            )
        else:
            width, stride = params.ngram_width, params.stride
            for index, doc in enumerate(documents):
                shard = filters[index % shards]
                for gram in strided_ngrams(normalize(doc), width, stride):
                    shard.insert(gram.text.encode("utf-8"))
                    report.tiles_hashed += 1
                report.documents += 1
                report.chars_in += len(doc)
    except SourceIOError:
        raise
    except OSError as exc:
        raise SourceIOError(f"after document {report.documents}: {exc}") from exc

    result = filters[0]
    for shard in filters[1:]:
        result = merge(result, shard)
    report.elapsed = time.perf_counter() - started
    report.final_saturation = result.saturation()
    return result, report


def _feed_shards_threaded(
    documents: Iterator[str],
    filters: list[BloomFilter],
    params: FilterParams,
    threads: int,
    report: BuildReport,
) -> int:
    """Dispatch documents to worker threads, one writer per shard filter."""
    shards = len(filters)
    workers = min(threads, shards)
    queues: list[queue.Queue] = [queue.Queue(maxsize=_QUEUE_DEPTH) for _ in range(workers)]
    tile_counts = [0] * workers
    failures: list[BaseException] = []
    width, stride = params.ngram_width, params.stride

    def run_worker(worker_id: int) -> None:
        inbox = queues[worker_id]
        hashed = 0
        try:
            while True:
                item = inbox.get()
                if item is None:
                    break
                shard_index, doc = item
                shard = filters[shard_index]
                for gram in strided_ngrams(normalize(doc), width, stride):
                    shard.insert(gram.text.encode("utf-8"))
                    hashed += 1
        except BaseException as exc:  # surfaced after join
            failures.append(exc)
        finally:
            tile_counts[worker_id] = hashed

    pool = [
        threading.Thread(target=run_worker, args=(w,), daemon=True)
        for w in range(workers)
    ]
    for worker in pool:
        worker.start()
    for index, doc in enumerate(documents):
        shard_index = index % shards
        queues[shard_index % workers].put((shard_index, doc))
        report.documents += 1
        report.chars_in += len(doc)
    for inbox in queues:
        inbox.put(None)
    for worker in pool:
        worker.join()
    if failures:
        raise failures[0]
    return sum(tile_counts)


def estimate_elements(
    source: DocumentSource,
    sample_fraction: float,
    *,
    ngram_width: int = 50,
    stride: int | None = None,
) -> int:
    """Extrapolate the corpus tile count from a systematic document sample.

    With ``sample_fraction`` 1.0 the count is exact (equals a full build's
    tiles_hashed); below 1.0 every round(1/fraction)-th document is measured
    and the total scaled up, so treat the result as an estimate.
    """
    if not 0.0 < sample_fraction <= 1.0:
        raise ValueError(
            f"sample_fraction must be in (0, 1], got {sample_fraction}"
        )
    if stride is None:
        stride = ngram_width
    step = max(1, round(1.0 / sample_fraction))
    total_docs = 0
    sampled_docs = 0
    sampled_tiles = 0
    for index, doc in enumerate(iter_documents(source)):
        total_docs += 1
        if index % step == 0:
            sampled_tiles += tile_count(normalized_length(doc), ngram_width, stride)
            sampled_docs += 1
    if sampled_docs == 0:
        return 0
    return round(sampled_tiles * total_docs / sampled_docs)


__all__ = [
    "DocumentSource",
    "BuildReport",
    "SourceIOError",
    "SOURCE_KINDS",
    "iter_documents",
    "build_portrait",
    "estimate_elements",
]
