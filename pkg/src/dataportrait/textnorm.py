"""Whitespace normalization and character n-gram extraction.

Normalization collapses every maximal run of ASCII whitespace to a single
space and drops leading/trailing runs, so e.g. differently indented copies of
a code snippet normalize to the same character sequence.  An offset map keeps
one original-text index per normalized character so matches can be reported
as spans of the raw input.

Two extraction modes share the same n-gram type: *tiled* n-grams step by
``stride`` (corpus ingestion side) and *sliding* n-grams step by one
character (query side).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

# The six ASCII whitespace scalars. Exotic Unicode spaces pass through.
_WS_RUN = re.compile(r"[ \t\n\r\f\v]+")


@dataclass
class NormalizedText:
    """Normalized characters plus, per character, its original-text index.

    For a collapsed whitespace run the mapped index is the run's first
    original position.  ``offset_map`` is strictly increasing.
    """

    chars: str
    offset_map: list[int]

    def __len__(self) -> int:
        return len(self.chars)


@dataclass(frozen=True)
class Ngram:
    start: int
    text: str


def normalize(raw: str) -> NormalizedText:
    """Collapse whitespace runs to single spaces; strip edge runs entirely."""
    pieces: list[str] = []
    offsets: list[int] = []
    pos = 0
    end_of_text = len(raw)
    for match in _WS_RUN.finditer(raw):
        start, end = match.span()
        if start > pos:
            pieces.append(raw[pos:start])
            offsets.extend(range(pos, start))
        if start > 0 and end < end_of_text:
            pieces.append(" ")
            offsets.append(start)
        pos = end
    if pos < end_of_text:
        pieces.append(raw[pos:])
        offsets.extend(range(pos, end_of_text))
    return NormalizedText("".join(pieces), offsets)


def normalized_length(raw: str) -> int:
    """Length of ``normalize(raw).chars`` without building the offset map."""
    length = 0
    pos = 0
    end_of_text = len(raw)
    for match in _WS_RUN.finditer(raw):
        start, end = match.span()
        length += start - pos
        if start > 0 and end < end_of_text:
            length += 1
        pos = end
    return length + (end_of_text - pos)


def strided_ngrams(nt: NormalizedText, width: int, stride: int) -> list[Ngram]:
    """Tiles starting at 0, stride, 2*stride, ...; a short tail is discarded."""
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    chars = nt.chars
    return [
        Ngram(start, chars[start : start + width])
        for start in range(0, len(chars) - width + 1, stride)
    ]


def sliding_ngrams(nt: NormalizedText, width: int) -> list[Ngram]:
    """One n-gram at every start position; empty if the text is too short."""
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    chars = nt.chars
    return [
        Ngram(start, chars[start : start + width])
        for start in range(len(chars) - width + 1)
    ]


def tile_count(length: int, width: int, stride: int) -> int:
    """How many tiles strided_ngrams yields for a text of ``length`` chars."""
    if length < width:
        return 0
    return (length - width) // stride + 1


__all__ = [
    "NormalizedText",
    "Ngram",
    "normalize",
    "normalized_length",
    "strided_ngrams",
    "sliding_ngrams",
    "tile_count",
]
