"""Bloom filter core: parameter planning, membership, merge, and the on-disk format.

The filter is a fixed-length bit array probed by ``k_hashes`` indices per
element.  Indices are derived by double hashing: one seeded 128-bit xxh3
evaluation of the element yields two 64-bit halves ``h1`` and ``h2`` (``h2``
forced odd), and probe ``i`` lands at ``(h1 + i*h2) mod 2**64 mod m_bits``.
Bits only ever transition 0 -> 1, so lookups can return false positives but
never false negatives.

Portrait file layout (all integers little-endian):

    magic             4 bytes  b"DPBF"
    format_version    u32      currently 1
    hash_algorithm_id u32      1 = xxh3_128 double hashing as above
    seed              u64
    ngram_width       u32
    stride            u32
    k_hashes          u32
    m_bits            u64
    inserted          u64
    reserved          16 bytes, written as zeros
    payload           ceil(m_bits/8) bytes; bit j lives at byte j>>3,
                      position j&7 (LSB-first)
    checksum          u64, FNV-1a 64 over header+payload
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import BinaryIO

import xxhash

MAGIC = b"DPBF"
FORMAT_VERSION = 1
HASH_XXH3_128 = 1

_U64 = (1 << 64) - 1
_HEADER = struct.Struct("<4sIIQIIIQQ16s")
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


class PortraitFormatError(ValueError):
    """A portrait stream violates the file format."""


class BadMagicError(PortraitFormatError):
    pass


class UnsupportedVersionError(PortraitFormatError):
    pass


class TruncatedStreamError(PortraitFormatError):
    pass


class ChecksumMismatchError(PortraitFormatError):
    pass


class ParamsMismatchError(ValueError):
    """Two filters with different geometry cannot be merged."""


def fnv1a64(data: bytes, value: int = _FNV_OFFSET) -> int:
    """64-bit FNV-1a over ``data``, optionally continuing from ``value``."""
    for byte in data:
        value = ((value ^ byte) * _FNV_PRIME) & _U64
    return value


@dataclass(frozen=True)
class FilterParams:
    """Sketch geometry. Two portraits are merge/query compatible iff equal.

    ``target_fpr`` is the design-time false positive target; it is advisory
    metadata, not persisted in the file format, and excluded from equality.
    """

    m_bits: int
    k_hashes: int
    ngram_width: int = 50
    stride: int | None = None
    seed: int = 0
    target_fpr: float = field(default=1e-3, compare=False)

    def __post_init__(self) -> None:
        if self.stride is None:
            object.__setattr__(self, "stride", self.ngram_width)
        if self.m_bits < 1:
            raise ValueError(f"m_bits must be >= 1, got {self.m_bits}")
        if not 1 <= self.k_hashes <= 64:
            raise ValueError(f"k_hashes must be in 1..=64, got {self.k_hashes}")
        if self.ngram_width < 1:
            raise ValueError(f"ngram_width must be >= 1, got {self.ngram_width}")
        if not 1 <= self.stride <= self.ngram_width:
            raise ValueError(
                f"stride must be in 1..={self.ngram_width}, got {self.stride}"
            )
        if not 0 <= self.seed <= _U64:
            raise ValueError("seed must fit in 64 bits")
        if not 0.0 < self.target_fpr < 1.0:
            raise ValueError(f"target_fpr must be in (0, 1), got {self.target_fpr}")

    @property
    def payload_bytes(self) -> int:
        return (self.m_bits + 7) // 8


def plan_parameters(
    expected_elements: int,
    target_fpr: float = 1e-3,
    *,
    ngram_width: int = 50,
    stride: int | None = None,
    seed: int = 0,
) -> FilterParams:
    """Size a filter for ``expected_elements`` at ``target_fpr``.

    Uses the optimal closed forms ``m = ceil(-n ln p / (ln 2)^2)`` and
    ``k = max(1, round(m/n * ln 2))``.
    """
    if expected_elements < 1:
        raise ValueError(f"expected_elements must be >= 1, got {expected_elements}")
    if not 0.0 < target_fpr < 1.0:
        raise ValueError(f"target_fpr must be in (0, 1), got {target_fpr}")
    m_bits = math.ceil(-expected_elements * math.log(target_fpr) / math.log(2) ** 2)
    k_hashes = max(1, round(m_bits / expected_elements * math.log(2)))
    k_hashes = min(64, k_hashes)
    return FilterParams(
        m_bits=m_bits,
        k_hashes=k_hashes,
        ngram_width=ngram_width,
        stride=stride,
        seed=seed,
        target_fpr=target_fpr,
    )


def _h1_h2(element: bytes, seed: int) -> tuple[int, int]:
    digest = xxhash.xxh3_128_intdigest(element, seed)
    return digest >> 64, (digest & _U64) | 1


def hash_indices(element: bytes, params: FilterParams) -> list[int]:
    """The ``k_hashes`` probe indices for ``element``, each in [0, m_bits)."""
    h1, h2 = _h1_h2(element, params.seed)
    m = params.m_bits
    return [((h1 + i * h2) & _U64) % m for i in range(params.k_hashes)]


class BloomFilter:
    """Bit array plus geometry and an insert counter.

    ``inserted`` counts insert calls, not distinct elements.
    """

    __slots__ = ("params", "bits", "inserted")

    def __init__(
        self,
        params: FilterParams,
        bits: bytearray | None = None,
        inserted: int = 0,
    ) -> None:
        if bits is None:
            bits = bytearray(params.payload_bytes)
        elif len(bits) != params.payload_bytes:
            raise ValueError(
                f"bit array holds {len(bits)} bytes, geometry needs "
                f"{params.payload_bytes}"
            )
        self.params = params
        self.bits = bits
        self.inserted = inserted

    def insert(self, element: bytes) -> None:
        h1, h2 = _h1_h2(element, self.params.seed)
        m = self.params.m_bits
        bits = self.bits
        for i in range(self.params.k_hashes):
            idx = ((h1 + i * h2) & _U64) % m
            bits[idx >> 3] |= 1 << (idx & 7)
        self.inserted += 1

    def contains(self, element: bytes) -> bool:
        h1, h2 = _h1_h2(element, self.params.seed)
        m = self.params.m_bits
        bits = self.bits
        for i in range(self.params.k_hashes):
            idx = ((h1 + i * h2) & _U64) % m
            if not bits[idx >> 3] >> (idx & 7) & 1:
                return False
        return True

    __contains__ = contains

    def popcount(self) -> int:
        return int.from_bytes(bytes(self.bits), "little").bit_count()

    def saturation(self) -> float:
        """Fraction of set bits; 0.0 empty, ~0.5 at design load."""
        return self.popcount() / self.params.m_bits

    def estimated_fpr(self) -> float:
        """Instantaneous false positive estimate: saturation ** k."""
        return self.saturation() ** self.params.k_hashes

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BloomFilter):
            return NotImplemented
        return (
            self.params == other.params
            and self.inserted == other.inserted
            and self.bits == other.bits
        )

    def __repr__(self) -> str:
        return (
            f"BloomFilter(m_bits={self.params.m_bits}, "
            f"k_hashes={self.params.k_hashes}, inserted={self.inserted})"
        )

    def serialize(self, sink: BinaryIO) -> None:
        """Write the portrait file; byte-identical for equal filters."""
        p = self.params
        header = _HEADER.pack(
            MAGIC,
            FORMAT_VERSION,
            HASH_XXH3_128,
            p.seed,
            p.ngram_width,
            p.stride,
            p.k_hashes,
            p.m_bits,
            self.inserted,
            b"\x00" * 16,
        )
        payload = bytes(self.bits)
        checksum = fnv1a64(payload, fnv1a64(header))
        sink.write(header)
        sink.write(payload)
        sink.write(struct.pack("<Q", checksum))

    @classmethod
    def deserialize(cls, source: BinaryIO) -> "BloomFilter":
        """Read a portrait file, verifying magic, version, length, and checksum."""
        header = source.read(_HEADER.size)
        if len(header) >= 4 and header[:4] != MAGIC:
            raise BadMagicError(f"bad magic {header[:4]!r}, expected {MAGIC!r}")
        if len(header) < _HEADER.size:
            raise TruncatedStreamError("stream ends inside the header")
        (
            _,
            version,
            hash_id,
            seed,
            ngram_width,
            stride,
            k_hashes,
            m_bits,
            inserted,
            _reserved,
        ) = _HEADER.unpack(header)
        if version != FORMAT_VERSION:
            raise UnsupportedVersionError(f"format version {version} not supported")
        if hash_id != HASH_XXH3_128:
            raise UnsupportedVersionError(f"hash algorithm {hash_id} not supported")
        try:
            params = FilterParams(
                m_bits=m_bits,
                k_hashes=k_hashes,
                ngram_width=ngram_width,
                stride=stride,
                seed=seed,
                # Not persisted; report the value k_hashes is optimal for.
                target_fpr=2.0 ** -k_hashes,
            )
        except ValueError as exc:
            raise PortraitFormatError(f"invalid header: {exc}") from exc
        payload = source.read(params.payload_bytes)
        if len(payload) < params.payload_bytes:
            raise TruncatedStreamError(
                f"payload holds {len(payload)} bytes, header declares "
                f"{params.payload_bytes}"
            )
        trailer = source.read(8)
        if len(trailer) < 8:
            raise TruncatedStreamError("stream ends inside the checksum trailer")
        expected = struct.unpack("<Q", trailer)[0]
        actual = fnv1a64(payload, fnv1a64(header))
        if actual != expected:
            raise ChecksumMismatchError(
                f"checksum {actual:#018x} does not match trailer {expected:#018x}"
            )
        return cls(params, bytearray(payload), inserted)


def merge(a: BloomFilter, b: BloomFilter) -> BloomFilter:
    """Bitwise-OR union of two same-geometry filters."""
    if a.params != b.params:
        raise ParamsMismatchError(
            f"cannot merge filters with different parameters: "
            f"{a.params} != {b.params}"
        )
    union = int.from_bytes(bytes(a.bits), "little") | int.from_bytes(
        bytes(b.bits), "little"
    )
    bits = bytearray(union.to_bytes(a.params.payload_bytes, "little"))
    return BloomFilter(a.params, bits, a.inserted + b.inserted)


def save_portrait(filt: BloomFilter, path) -> None:
    with open(path, "wb") as sink:
        filt.serialize(sink)


def load_portrait(path) -> BloomFilter:
    with open(path, "rb") as source:
        return BloomFilter.deserialize(source)


__all__ = [
    "FilterParams",
    "BloomFilter",
    "plan_parameters",
    "hash_indices",
    "merge",
    "save_portrait",
    "load_portrait",
    "fnv1a64",
    "PortraitFormatError",
    "BadMagicError",
    "UnsupportedVersionError",
    "TruncatedStreamError",
    "ChecksumMismatchError",
    "ParamsMismatchError",
    "MAGIC",
    "FORMAT_VERSION",
    "HASH_XXH3_128",
]
