"""Sliding-window membership checks, chaining, and overlap statistics.

Querying slides a width-``w`` window one character at a time over the
normalized document and tests each window against the filter.  True flags
spaced exactly ``w`` apart are joined into *chains*: inferred contiguous
overlaps with the sketched corpus (inferred, because a filter stores no
positions — see ``chain_fp_probability`` for why long chains are trustworthy
anyway).  The longest chain acts as an approximate longest common substring
between the document and the corpus.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from .sketch import BloomFilter
from .textnorm import NormalizedText, normalize, sliding_ngrams

DEFAULT_MEMBERSHIP_THRESHOLD = 0.9


@dataclass
class Chain:
    """A maximal run of matching windows spaced exactly one width apart.

    Offsets are reported both in normalized coordinates (``start_norm``) and
    as a half-open span of the original text (``start_orig``/``end_orig``).
    """

    start_norm: int
    count: int
    char_length: int
    start_orig: int
    end_orig: int
    text: str


@dataclass
class QueryReport:
    """Everything one document query produced."""

    flags: list[bool]
    chains: list[Chain]
    longest_chain: Chain | None
    doc_norm_length: int
    expected_matches: float
    overlap_ratio: float


@dataclass
class OverlapSummary:
    """Corpus-level expected-overlap row for one dataset."""

    dataset_name: str
    instances: int
    expected_overlap_pct: float
    total_query_seconds: float


def chain(
    flags: list[bool], width: int, nt: NormalizedText | None = None
) -> list[Chain]:
    """Partition true flags into maximal runs with common difference ``width``.

    With ``nt`` supplied, chains carry original-text offsets and the matched
    substring; without it, offsets fall back to normalized coordinates and
    ``text`` is empty.
    """
    chains: list[Chain] = []
    n = len(flags)
    for start in range(n):
        if not flags[start]:
            continue
        if start >= width and flags[start - width]:
            continue  # interior of a chain anchored earlier
        count = 1
        while start + count * width < n and flags[start + count * width]:
            count += 1
        char_length = count * width
        if nt is None:
            chains.append(
                Chain(start, count, char_length, start, start + char_length, "")
            )
        else:
            last = start + char_length - 1
            chains.append(
                Chain(
                    start_norm=start,
                    count=count,
                    char_length=char_length,
                    start_orig=nt.offset_map[start],
                    end_orig=nt.offset_map[last] + 1,
                    text=nt.chars[start : start + char_length],
                )
            )
    return chains


def check_document(filt: BloomFilter, raw: str) -> QueryReport:
    """Normalize, slide, test, and chain one document against a portrait."""
    nt = normalize(raw)
    width = filt.params.ngram_width
    flags = [
        filt.contains(gram.text.encode("utf-8"))
        for gram in sliding_ngrams(nt, width)
    ]
    chains = chain(flags, width, nt=nt)
    longest: Chain | None = None
    for candidate in chains:
        if longest is None or candidate.char_length > longest.char_length:
            longest = candidate  # first occurrence wins ties: smallest start
    doc_norm_length = len(nt.chars)
    ratio = longest.char_length / doc_norm_length if longest else 0.0
    return QueryReport(
        flags=flags,
        chains=chains,
        longest_chain=longest,
        doc_norm_length=doc_norm_length,
        expected_matches=expected_matches(doc_norm_length, width),
        overlap_ratio=ratio,
    )


def expected_matches(doc_norm_length: int, width: int) -> float:
    """Alignment-averaged tile matches for a fully present document.

    A length-N string covers (N - w + 1) possible tile positions summed over
    the w equally likely tilings, so the expectation is (N - w + 1) / w; zero
    when the document is shorter than one tile.
    """
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    if doc_norm_length < width:
        return 0.0
    return (doc_norm_length - width + 1) / width


def expected_overlap(
    reports: Iterable[QueryReport],
    *,
    dataset_name: str = "",
    total_query_seconds: float = 0.0,
) -> OverlapSummary:
    """Observed longest-chain matches over alignment-averaged expectations.

    Accepts any iterable (a generator streams fine); consumed once.
    """
    matched = 0
    expected = 0.0
    instances = 0
    for report in reports:
        instances += 1
        if report.longest_chain is not None:
            matched += report.longest_chain.count
        expected += report.expected_matches
    if instances == 0:
        raise ValueError("expected_overlap needs at least one report")
    pct = 100.0 * matched / expected if expected > 0.0 else 0.0
    return OverlapSummary(dataset_name, instances, pct, total_query_seconds)


def classify_membership(
    report: QueryReport, threshold: float = DEFAULT_MEMBERSHIP_THRESHOLD
) -> bool:
    """True iff the longest chain covers more than ``threshold`` of the text."""
    return report.overlap_ratio > threshold


def chain_fp_probability(count: int, fpr: float) -> float:
    """Upper bound on a length-``count`` chain arising purely from collisions."""
    return fpr**count


def _chain_dict(c: Chain) -> dict:
    return {
        "start_orig": c.start_orig,
        "end_orig": c.end_orig,
        "start_norm": c.start_norm,
        "count": c.count,
        "char_length": c.char_length,
        "text": c.text,
    }


def report_payload(
    report: QueryReport,
    portrait_name: str,
    ngram_width: int,
    include_flags: bool = False,
    elapsed_ms: float = 0.0,
    threshold: float = DEFAULT_MEMBERSHIP_THRESHOLD,
) -> dict:
    """The structured record for one query; shared by the CLI and the service.

    Chains are sorted by char_length descending (start ascending on ties) so
    identical queries serialize identically.
    """
    ordered = sorted(report.chains, key=lambda c: (-c.char_length, c.start_norm))
    return {
        "portrait": portrait_name,
        "ngram_width": ngram_width,
        "doc_norm_length": report.doc_norm_length,
        "chains": [_chain_dict(c) for c in ordered],
        "longest_chain": (
            _chain_dict(report.longest_chain) if report.longest_chain else None
        ),
        "overlap_ratio": report.overlap_ratio,
        "expected_matches": report.expected_matches,
        "is_member": classify_membership(report, threshold),
        "flags": list(report.flags) if include_flags else None,
        "elapsed_ms": elapsed_ms,
    }


def payload_json(payload: dict) -> str:
    """Canonical JSON rendering of a report payload (stable byte-for-byte)."""
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))


def format_report(
    report: QueryReport,
    portrait_name: str = "portrait",
    threshold: float = DEFAULT_MEMBERSHIP_THRESHOLD,
) -> str:
    """Human-readable rendering: verdict plus an inferred-chain table."""
    member = classify_membership(report, threshold)
    lines = [
        f"portrait:         {portrait_name}",
        f"normalized chars: {report.doc_norm_length}",
        f"window checks:    {len(report.flags)}",
        f"expected matches: {report.expected_matches:.2f}",
        f"overlap ratio:    {report.overlap_ratio:.4f}",
        f"member (> {threshold:g}):   {'yes' if member else 'no'}",
    ]
    if not report.chains:
        lines.append("no matching windows")
        return "\n".join(lines)
    lines.append("inferred chains (longest first):")
    lines.append("  chars  ngrams  norm_start  orig_span        text")
    ordered = sorted(report.chains, key=lambda c: (-c.char_length, c.start_norm))
    for c in ordered:
        snippet = c.text if len(c.text) <= 50 else c.text[:49] + "…"
        span = f"[{c.start_orig},{c.end_orig})"
        lines.append(
            f"  {c.char_length:<6} {c.count:<7} {c.start_norm:<11} {span:<16} {snippet}"
        )
    return "\n".join(lines)


__all__ = [
    "Chain",
    "QueryReport",
    "OverlapSummary",
    "chain",
    "check_document",
    "expected_matches",
    "expected_overlap",
    "classify_membership",
    "chain_fp_probability",
    "report_payload",
    "payload_json",
    "format_report",
    "DEFAULT_MEMBERSHIP_THRESHOLD",
]
