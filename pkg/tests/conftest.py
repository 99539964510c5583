"""Shared fixtures: synthetic corpora and a session-scoped desk-scale portrait."""

from __future__ import annotations

import json
import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from dataportrait import build_portrait, plan_parameters, save_portrait
from dataportrait.ingest import DocumentSource, estimate_elements

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ALPHABET = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
_BYTE_TABLE = bytes(ord(ALPHABET[b % len(ALPHABET)]) for b in range(256))

CORPUS_DOCS = 10_000
CORPUS_SEED = 20240611


def random_text(rng: random.Random, length: int) -> str:
    """Deterministic low-redundancy text: uniform-ish draws from ALPHABET."""
    return rng.randbytes(length).translate(_BYTE_TABLE).decode("ascii")


def make_document(rng: random.Random, min_len: int = 1500, max_len: int = 2000) -> str:
    """One synthetic document: random text with sparse single spaces."""
    length = rng.randint(min_len, max_len)
    chars = list(random_text(rng, length))
    pos = rng.randint(4, 12)
    while pos < length - 1:
        chars[pos] = " "
        pos += rng.randint(4, 12)
    return "".join(chars)


def make_corpus(count: int, seed: int, min_len: int = 1500, max_len: int = 2000) -> list[str]:
    rng = random.Random(seed)
    docs = []
    for i in range(count):
        doc = make_document(rng, min_len, max_len)
        if i % 10 == 0:
            # some messy whitespace so ingestion exercises normalization
            doc = "  " + doc.replace(" ", " \t ", 1) + "\n"
        docs.append(doc)
    return docs


def write_jsonl(path: Path, docs: list[str]) -> None:
    with open(path, "w", encoding="utf-8") as sink:
        for doc in docs:
            sink.write(json.dumps({"text": doc}, ensure_ascii=False))
            sink.write("\n")


@pytest.fixture(scope="session")
def corpus_docs() -> list[str]:
    return make_corpus(CORPUS_DOCS, CORPUS_SEED)


@pytest.fixture(scope="session")
def corpus_jsonl(corpus_docs, tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("corpus") / "corpus.jsonl"
    write_jsonl(path, corpus_docs)
    return path


@pytest.fixture(scope="session")
def fixture_portrait(corpus_jsonl, tmp_path_factory):
    """Portrait built at exact design capacity over the session corpus.

    Returns (filter, params, build_report, portrait_path, corpus_path).
    """
    source = DocumentSource(kind="jsonl", paths=(str(corpus_jsonl),))
    tiles = estimate_elements(source, 1.0, ngram_width=50, stride=50)
    params = plan_parameters(tiles, 1e-3, ngram_width=50, stride=50)
    filt, report = build_portrait(source, params)
    assert report.tiles_hashed == tiles
    path = tmp_path_factory.mktemp("portrait") / "fixture.dpbf"
    save_portrait(filt, path)
    return filt, params, report, path, corpus_jsonl
