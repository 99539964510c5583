"""Data portraits: strided Bloom filter sketches for corpus membership testing.

A portrait records a text corpus as a Bloom filter over non-overlapping
(width-strided) character n-grams, costing a few percent of the corpus size.
Queries slide a window over a document one character at a time, chain the
matching windows, and report inferred overlapping substrings with
original-text offsets — answering "was this text in the corpus?" without
redistributing the corpus itself.
"""

from .ingest import (
    BuildReport,
    DocumentSource,
    SourceIOError,
    build_portrait,
    estimate_elements,
    iter_documents,
)
from .query import (
    Chain,
    OverlapSummary,
    QueryReport,
    chain,
    chain_fp_probability,
    check_document,
    classify_membership,
    expected_matches,
    expected_overlap,
    format_report,
    payload_json,
    report_payload,
)
from .sketch import (
    BadMagicError,
    BloomFilter,
    ChecksumMismatchError,
    FilterParams,
    ParamsMismatchError,
    PortraitFormatError,
    TruncatedStreamError,
    UnsupportedVersionError,
    hash_indices,
    load_portrait,
    merge,
    plan_parameters,
    save_portrait,
)
from .textnorm import (
    NormalizedText,
    Ngram,
    normalize,
    sliding_ngrams,
    strided_ngrams,
)

__version__ = "0.1.0"

__all__ = [
    "BloomFilter",
    "FilterParams",
    "plan_parameters",
    "hash_indices",
    "merge",
    "save_portrait",
    "load_portrait",
    "PortraitFormatError",
    "BadMagicError",
    "UnsupportedVersionError",
    "TruncatedStreamError",
    "ChecksumMismatchError",
    "ParamsMismatchError",
    "NormalizedText",
    "Ngram",
    "normalize",
    "strided_ngrams",
    "sliding_ngrams",
    "DocumentSource",
    "BuildReport",
    "SourceIOError",
    "iter_documents",
    "build_portrait",
    "estimate_elements",
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
    "__version__",
]
